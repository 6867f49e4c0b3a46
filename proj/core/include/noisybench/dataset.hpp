#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "noisybench/campaign.hpp"
#include "noisybench/param_space.hpp"
#include "noisybench/surfaces.hpp"

namespace noisybench::data {

// A tabular experiment record: n rows of d features plus one target column.
// Feature columns live within the declared bounds; bounds always come from
// the metadata sidecar, never from the data itself.
struct DatasetTable {
  std::string name;
  std::shared_ptr<const ParamSpace> space;
  std::string target_name;
  Goal goal = Goal::Minimize;
  std::vector<std::vector<double>> rows;  // each row: space->dim() features, then the target

  std::size_t size() const { return rows.size(); }
};

// Full validation as required at ingest and training time: at least 10 rows,
// every cell finite, every feature within bounds. ValidationError on failure,
// naming the offending row and column.
void validate_dataset(const DatasetTable& table);

// Reads `<name>.csv` with its mandatory `<name>.meta.json` sidecar. Columns
// are matched by header name; unknown or missing columns are errors.
DatasetTable ingest(const std::filesystem::path& csv_path);
DatasetTable ingest(const std::filesystem::path& csv_path,
                    const std::filesystem::path& meta_path);

// Writes `<dir>/<table.name>.csv` plus the metadata sidecar; returns the csv
// path. Existing files are overwritten.
std::filesystem::path write_dataset(const DatasetTable& table,
                                    const std::filesystem::path& dir);

// Seed-deterministic random split into ceil(ratio * n) training rows and the
// rest. Relative row order is preserved within each part.
std::pair<DatasetTable, DatasetTable> split(const DatasetTable& table, double ratio,
                                            std::uint32_t seed);

// Samples a surface (plus optional observation noise) into a dataset, for
// emulator development without real experiment data. Features are in the
// surface's native domain.
DatasetTable gen_synthetic(const surfaces::SurfaceSpec& spec, int n_rows,
                           std::uint32_t seed);

// Local dataset/emulator registry. The root is $NOISYBENCH_HOME when set,
// otherwise ~/.noisybench; subdirectories are created on demand.
std::filesystem::path registry_root();
std::filesystem::path datasets_dir();
std::filesystem::path emulators_dir();
std::vector<std::string> list_datasets();

// Validates the pair and copies it into the registry under the csv stem's
// name. Nothing is written if validation fails.
std::string add_dataset(const std::filesystem::path& csv_path,
                        const std::filesystem::path& meta_path);

}  // namespace noisybench::data
