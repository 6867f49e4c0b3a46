#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "noisybench/database.hpp"

namespace noisybench::plot {

// Output pair for one target: an SVG convergence chart and the CSV behind it.
struct RenderedTarget {
  std::string target;
  std::filesystem::path svg;
  std::filesystem::path csv;
};

struct RenderOptions {
  int width = 960;
  int height = 540;
};

// Renders one chart per target found in the database: the mean best-so-far
// trace per planner plus a min-to-max band over its completed campaigns.
// Campaigns that ended in an error are left out, and traces are truncated to
// the shortest completed campaign of the target so every curve covers the
// same iterations. Output is byte-deterministic (no timestamps). Targets with
// no completed campaigns are skipped; ValidationError if nothing remains.
std::vector<RenderedTarget> render(const Database& db,
                                   const std::filesystem::path& dir,
                                   const RenderOptions& options = {});

}  // namespace noisybench::plot
