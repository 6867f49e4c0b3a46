#include "noisybench/database.hpp"

#include <fstream>

#include <json.hpp>

#include "json_util.hpp"
#include "noisybench/errors.hpp"

namespace noisybench {

using detail::format_double;
using detail::json_quote;

Database::Database(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in.is_open()) return;  // missing file behaves as an empty store
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    Campaign c = campaign_from_json_line(line, line_number);
    if (contains(c.id())) {
      throw ParseError("duplicate campaign id " + c.id(), line_number);
    }
    campaigns_.push_back(std::move(c));
  }
}

Database Database::load(const std::filesystem::path& path) { return Database(path); }

void Database::append(const Campaign& campaign) {
  if (contains(campaign.id())) {
    throw ValidationError("campaign id already in database: " + campaign.id());
  }
  const std::filesystem::path dir = path_.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  std::ofstream out(path_, std::ios::app);
  if (!out.is_open()) {
    throw Error("cannot open database file for writing: " + path_.string());
  }
  out << campaign_to_json_line(campaign) << '\n';
  if (!out) throw Error("write to database failed: " + path_.string());
  campaigns_.push_back(campaign);
}

bool Database::contains(const std::string& id) const {
  for (const Campaign& c : campaigns_) {
    if (c.id() == id) return true;
  }
  return false;
}

const Campaign& Database::by_id(const std::string& id) const {
  for (const Campaign& c : campaigns_) {
    if (c.id() == id) return c;
  }
  throw NotFoundError("no campaign with id " + id);
}

std::vector<const Campaign*> Database::for_target(const std::string& surface_id) const {
  std::vector<const Campaign*> out;
  for (const Campaign& c : campaigns_) {
    if (c.surface_id() == surface_id) out.push_back(&c);
  }
  return out;
}

std::string campaign_to_json_line(const Campaign& campaign) {
  std::string out;
  out += "{\"id\":" + json_quote(campaign.id());
  out += ",\"planner\":" + json_quote(campaign.planner_name());
  out += ",\"surface\":" + json_quote(campaign.surface_id());
  out += ",\"goal\":" + json_quote(to_string(campaign.goal()));
  out += ",\"seed\":" + std::to_string(campaign.seed());
  out += ",\"space\":[";
  if (!campaign.observations().empty()) {
    const ParamSpace& space = campaign.observations().front().params.space();
    for (std::size_t i = 0; i < space.dim(); ++i) {
      if (i > 0) out += ',';
      const ParamDef& p = space.param(i);
      out += "{\"name\":" + json_quote(p.name);
      out += ",\"low\":" + format_double(p.low);
      out += ",\"high\":" + format_double(p.high) + "}";
    }
  }
  out += "],\"observations\":[";
  for (std::size_t i = 0; i < campaign.observations().size(); ++i) {
    if (i > 0) out += ',';
    const Observation& o = campaign.observations()[i];
    out += "{\"index\":" + std::to_string(o.eval_index);
    out += ",\"params\":[";
    for (std::size_t j = 0; j < o.params.dim(); ++j) {
      if (j > 0) out += ',';
      out += format_double(o.params[j]);
    }
    out += "],\"value\":" + format_double(o.value);
    out += ",\"time\":" + json_quote(o.timestamp) + "}";
  }
  out += "]";
  if (!campaign.error().empty()) {
    out += ",\"error\":" + json_quote(campaign.error());
  }
  out += "}";
  return out;
}

Campaign campaign_from_json_line(const std::string& line, long line_number) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad campaign record: ") + e.what(), line_number);
  }
  try {
    Campaign campaign(j.at("id").get<std::string>(), j.at("planner").get<std::string>(),
                      j.at("surface").get<std::string>(),
                      goal_from_string(j.at("goal").get<std::string>()),
                      j.at("seed").get<std::uint32_t>());
    const auto& obs = j.at("observations");
    std::shared_ptr<const ParamSpace> space;
    if (!obs.empty()) {
      std::vector<ParamDef> defs;
      for (const auto& p : j.at("space")) {
        defs.push_back({p.at("name").get<std::string>(), p.at("low").get<double>(),
                        p.at("high").get<double>()});
      }
      space = std::make_shared<const ParamSpace>(std::move(defs));
    }
    for (const auto& o : obs) {
      std::vector<double> values = o.at("params").get<std::vector<double>>();
      campaign.add(ParamVector(space, std::move(values)), o.at("value").get<double>(),
                   o.at("time").get<std::string>());
    }
    if (j.contains("error")) campaign.set_error(j.at("error").get<std::string>());
    return campaign;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(std::string("bad campaign record: ") + e.what(), line_number);
  }
}

}  // namespace noisybench
