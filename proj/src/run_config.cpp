#include "occ/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>

#include "occ/errors.hpp"

namespace occ {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  for (const auto& item : csv::split_line(value)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!csv::parse_double(v, out)) throw UsageError("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  const double x = to_real(key, v);
  if (x != std::floor(x)) throw UsageError("config: '" + key + "' expects an integer, got '" + v + "'");
  return static_cast<long long>(x);
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const long long x = to_int(key, v);
  if (x < 0) throw UsageError("config: '" + key + "' must be non-negative");
  return static_cast<std::size_t>(x);
}

std::vector<double> to_reals(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(to_real(key, item));
  if (out.empty()) throw UsageError("config: '" + key + "' is empty");
  return out;
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::string& base_dir) {
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  const auto dataset = [&](const std::string& id) -> DatasetEntry& {
    auto it = std::find_if(cfg.datasets.begin(), cfg.datasets.end(),
                           [&](const DatasetEntry& d) { return d.id == id; });
    if (it != cfg.datasets.end()) return *it;
    DatasetEntry entry;
    entry.id = id;
    entry.name = id;
    cfg.datasets.push_back(entry);
    return cfg.datasets.back();
  };

  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));

    if (key == "seed") {
      const long long s = to_int(key, value);
      if (s < 0) throw UsageError("config: seed must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "models") {
      cfg.models = value;
    } else if (key == "test_fraction") {
      cfg.protocol.test_fraction = to_real(key, value);
    } else if (key == "cv_folds") {
      cfg.protocol.grid_options.folds = static_cast<int>(to_int(key, value));
    } else if (key == "iterations") {
      cfg.protocol.iterations = static_cast<int>(to_int(key, value));
    } else if (key == "knn_k") {
      cfg.protocol.knn_k = static_cast<int>(to_int(key, value));
    } else if (key == "grid.C") {
      cfg.protocol.grid.C = to_reals(key, value);
    } else if (key == "grid.d") {
      cfg.protocol.grid.d.clear();
      for (double d : to_reals(key, value)) cfg.protocol.grid.d.push_back(static_cast<int>(d));
    } else if (key == "grid.beta") {
      cfg.protocol.grid.beta = to_reals(key, value);
    } else if (key == "grid.eta") {
      cfg.protocol.grid.eta = to_reals(key, value);
    } else if (key == "grid.sigma") {
      cfg.protocol.grid.sigma = to_reals(key, value);
    } else if (key.rfind("dataset.", 0) == 0) {
      const auto dot = key.find('.', 8);
      if (dot == std::string::npos) throw UsageError("config: malformed dataset key '" + key + "'");
      DatasetEntry& ds = dataset(key.substr(8, dot - 8));
      const std::string field = key.substr(dot + 1);
      if (field == "path") {
        std::filesystem::path p(value);
        ds.path = (p.is_relative() && !base_dir.empty()) ? (std::filesystem::path(base_dir) / p).string()
                                                         : value;
      } else if (field == "name") {
        ds.name = value;
      } else if (field == "label") {
        ds.label = value;
      } else if (field == "drop") {
        ds.drop = split_list(value);
      } else if (field == "n_target") {
        ds.n_target = to_count(key, value);
      } else if (field == "n_outlier") {
        ds.n_outlier = to_count(key, value);
      } else {
        throw UsageError("config: unknown dataset field '" + field + "'");
      }
    } else {
      throw UsageError("config: unknown key '" + key + "'");
    }
  }
  for (const auto& ds : cfg.datasets) {
    if (ds.path.empty()) throw UsageError("config: dataset '" + ds.id + "' has no path");
    if (ds.n_target == 0) throw UsageError("config: dataset '" + ds.id + "' needs n_target >= 1");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path + "'");
  return parse_run_config(in, std::filesystem::path(path).parent_path().string());
}

std::vector<DatasetSpec> load_datasets(const RunConfig& config) {
  std::vector<DatasetSpec> out;
  for (const auto& entry : config.datasets) {
    LoadOptions opts;
    opts.label_column = entry.label;
    opts.drop_columns = entry.drop;
    opts.name = entry.name;
    DatasetSpec ds;
    ds.name = entry.name;
    ds.table = load_table(entry.path, opts);
    ds.n_target = entry.n_target;
    ds.n_outlier = entry.n_outlier;
    out.push_back(std::move(ds));
  }
  return out;
}

}  // namespace occ
