#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "noisybench/campaign.hpp"

namespace noisybench {

// Append-only campaign store: one JSON object per line. A single writer owns
// the file; readers may load a snapshot at any time. Loading an empty or
// missing file gives an empty database.
class Database {
 public:
  explicit Database(std::filesystem::path path);

  static Database load(const std::filesystem::path& path);

  // Serializes the campaign and appends one line to the file. Campaign ids
  // must be unique within a database.
  void append(const Campaign& campaign);

  const std::vector<Campaign>& campaigns() const { return campaigns_; }
  const std::filesystem::path& path() const { return path_; }

  bool contains(const std::string& id) const;
  const Campaign& by_id(const std::string& id) const;  // NotFoundError if absent
  std::vector<const Campaign*> for_target(const std::string& surface_id) const;

 private:
  std::filesystem::path path_;
  std::vector<Campaign> campaigns_;
};

// One-line JSON form of a campaign (no trailing newline). Doubles are printed
// with %.17g so values survive a save/load round trip bit-for-bit.
std::string campaign_to_json_line(const Campaign& campaign);

// Parses one line; `line_number` (1-based) is used in error messages.
Campaign campaign_from_json_line(const std::string& line, long line_number = -1);

}  // namespace noisybench
