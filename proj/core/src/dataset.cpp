#include "noisybench/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include <json.hpp>

#include "noisybench/errors.hpp"
#include "noisybench/noise.hpp"
#include "noisybench/rng.hpp"
#include "json_util.hpp"

namespace noisybench::data {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (cell.empty() || end != begin + cell.size()) {
    throw ValidationError("row " + std::to_string(row) + ", column '" + column +
                          "': not a number: '" + cell + "'");
  }
  return v;
}

std::shared_ptr<const ParamSpace> space_from_meta(const json& j, const std::string& where) {
  if (!j.contains("params") || !j["params"].is_array() || j["params"].empty()) {
    throw ParseError(where + ": metadata needs a non-empty 'params' array");
  }
  std::vector<ParamDef> defs;
  for (const auto& p : j["params"]) {
    defs.push_back({p.at("name").get<std::string>(), p.at("low").get<double>(),
                    p.at("high").get<double>()});
  }
  return std::make_shared<const ParamSpace>(std::move(defs));
}

}  // namespace

void validate_dataset(const DatasetTable& table) {
  if (!table.space) throw ValidationError("dataset has no parameter space");
  if (table.target_name.empty()) throw ValidationError("dataset has no target name");
  const std::size_t d = table.space->dim();
  if (table.rows.size() < 10) {
    throw ValidationError("dataset needs at least 10 rows (got " +
                          std::to_string(table.rows.size()) + ")");
  }
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != d + 1) {
      throw ValidationError("row " + std::to_string(r + 1) + ": expected " +
                            std::to_string(d + 1) + " values, got " +
                            std::to_string(row.size()));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!std::isfinite(row[c])) {
        const std::string col = c < d ? table.space->param(c).name : table.target_name;
        throw ValidationError("row " + std::to_string(r + 1) + ", column '" + col +
                              "': non-finite value");
      }
    }
    for (std::size_t c = 0; c < d; ++c) {
      const ParamDef& p = table.space->param(c);
      if (row[c] < p.low || row[c] > p.high) {
        throw ValidationError("row " + std::to_string(r + 1) + ", column '" + p.name +
                              "': value " + detail::format_double(row[c]) +
                              " outside bounds [" + detail::format_double(p.low) + ", " +
                              detail::format_double(p.high) + "]");
      }
    }
  }
}

DatasetTable ingest(const fs::path& csv_path) {
  fs::path meta = csv_path;
  meta.replace_extension();          // drop .csv
  meta += ".meta.json";
  return ingest(csv_path, meta);
}

DatasetTable ingest(const fs::path& csv_path, const fs::path& meta_path) {
  std::ifstream meta_in(meta_path);
  if (!meta_in) throw NotFoundError("metadata sidecar not found: " + meta_path.string());
  json meta;
  try {
    meta = json::parse(meta_in);
  } catch (const std::exception& e) {
    throw ParseError(meta_path.string() + ": " + e.what());
  }

  DatasetTable table;
  table.name = csv_path.stem().string();
  try {
    table.space = space_from_meta(meta, meta_path.string());
    table.target_name = meta.at("target").get<std::string>();
    table.goal = goal_from_string(meta.at("goal").get<std::string>());
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(meta_path.string() + ": " + e.what());
  }

  std::ifstream csv_in(csv_path);
  if (!csv_in) throw NotFoundError("dataset not found: " + csv_path.string());
  std::string line;
  if (!std::getline(csv_in, line)) {
    throw ValidationError(csv_path.string() + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();

  // Columns are matched by name so file order does not matter, but every
  // declared column must appear and nothing else may.
  const std::vector<std::string> header = split_csv_line(line);
  const std::size_t d = table.space->dim();
  std::vector<std::string> expected;
  for (std::size_t i = 0; i < d; ++i) expected.push_back(table.space->param(i).name);
  expected.push_back(table.target_name);
  std::vector<std::size_t> column_of(expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto it = std::find(header.begin(), header.end(), expected[i]);
    if (it == header.end()) {
      throw ValidationError(csv_path.string() + ": missing column '" + expected[i] + "'");
    }
    column_of[i] = static_cast<std::size_t>(it - header.begin());
  }
  for (const std::string& h : header) {
    if (std::find(expected.begin(), expected.end(), h) == expected.end()) {
      throw ValidationError(csv_path.string() + ": unexpected column '" + h + "'");
    }
  }

  std::size_t row_number = 0;
  while (std::getline(csv_in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row_number;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError("row " + std::to_string(row_number) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
    }
    std::vector<double> row(expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      row[i] = parse_cell(cells[column_of[i]], row_number, expected[i]);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw ValidationError(csv_path.string() + ": no data rows");
  validate_dataset(table);
  return table;
}

std::filesystem::path write_dataset(const DatasetTable& table, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path csv_path = dir / (table.name + ".csv");
  const fs::path meta_path = dir / (table.name + ".meta.json");

  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw Error("cannot write " + csv_path.string());
  for (std::size_t i = 0; i < table.space->dim(); ++i) {
    csv << table.space->param(i).name << ',';
  }
  csv << table.target_name << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) csv << ',';
      csv << detail::format_double(row[i]);
    }
    csv << '\n';
  }

  json meta;
  meta["target"] = table.target_name;
  meta["goal"] = to_string(table.goal);
  meta["params"] = json::array();
  for (std::size_t i = 0; i < table.space->dim(); ++i) {
    const ParamDef& p = table.space->param(i);
    meta["params"].push_back({{"name", p.name}, {"low", p.low}, {"high", p.high}});
  }
  std::ofstream meta_out(meta_path, std::ios::trunc);
  if (!meta_out) throw Error("cannot write " + meta_path.string());
  meta_out << meta.dump(2) << '\n';
  return csv_path;
}

std::pair<DatasetTable, DatasetTable> split(const DatasetTable& table, double ratio,
                                            std::uint32_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("split ratio must be in (0, 1)");
  }
  const std::size_t n = table.rows.size();
  const auto n_train =
      static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw ValidationError("dataset too small to split " + std::to_string(n) +
                          " rows at ratio " + std::to_string(ratio));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RngStream rng(derive_seed(seed, hash_tag("split")));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.pick(i)]);

  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  const auto take = [&](const std::vector<std::size_t>& idx, const std::string& suffix) {
    DatasetTable part;
    part.name = table.name + suffix;
    part.space = table.space;
    part.target_name = table.target_name;
    part.goal = table.goal;
    for (std::size_t i : idx) part.rows.push_back(table.rows[i]);
    return part;
  };
  return {take(train_idx, "_train"), take(test_idx, "_test")};
}

DatasetTable gen_synthetic(const surfaces::SurfaceSpec& spec, int n_rows,
                           std::uint32_t seed) {
  if (n_rows < 10) throw ConfigError("synthetic dataset needs at least 10 rows");
  const auto surface = surfaces::make_surface(spec);
  RngStream rng(derive_seed(seed, hash_tag("synthetic")));

  DatasetTable table;
  table.name = surface->id() + "_n" + std::to_string(n_rows);
  table.space = surface->domain();
  table.target_name = "target";
  table.goal = Goal::Minimize;
  const std::size_t d = table.space->dim();
  for (int r = 0; r < n_rows; ++r) {
    std::vector<double> u(d);
    for (double& ui : u) ui = rng.uniform();
    std::vector<double> row = surface->to_domain(u);
    double y = surface->value(u);
    if (spec.noise) y += noise::sample(*spec.noise, rng);
    row.push_back(y);
    table.rows.push_back(std::move(row));
  }
  validate_dataset(table);
  return table;
}

std::filesystem::path registry_root() {
  if (const char* home = std::getenv("NOISYBENCH_HOME"); home && *home) {
    return fs::path(home);
  }
  if (const char* home = std::getenv("HOME"); home && *home) {
    return fs::path(home) / ".noisybench";
  }
  return fs::current_path() / ".noisybench";
}

std::filesystem::path datasets_dir() {
  const fs::path dir = registry_root() / "datasets";
  fs::create_directories(dir);
  return dir;
}

std::filesystem::path emulators_dir() {
  const fs::path dir = registry_root() / "emulators";
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> list_datasets() {
  std::vector<std::string> names;
  const fs::path dir = datasets_dir();
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    fs::path meta = entry.path();
    meta.replace_extension();
    meta += ".meta.json";
    if (fs::exists(meta)) names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::string add_dataset(const fs::path& csv_path, const fs::path& meta_path) {
  DatasetTable table = ingest(csv_path, meta_path);
  write_dataset(table, datasets_dir());
  return table.name;
}

}  // namespace noisybench::data
