#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "occ/evaluation.hpp"

namespace occ {

struct DatasetEntry {
  std::string id;
  std::string name;
  std::string path;
  std::string label = "label";
  std::vector<std::string> drop;
  std::size_t n_target = 0;
  std::size_t n_outlier = 0;
};

/// Flat `key = value` run description. Example:
///
///   seed = 7
///   models = gessvdd-knn-g-min, svdd-rbf
///   dataset.d1.path = creditcard.csv
///   dataset.d1.label = Class
///   dataset.d1.drop = Time
///   dataset.d1.n_target = 2800
///   dataset.d1.n_outlier = 344
///   grid.C = 0.1, 0.2
///
/// Blank lines and lines starting with '#' are ignored. Relative dataset
/// paths resolve against the config file's directory.
struct RunConfig {
  std::vector<DatasetEntry> datasets;
  std::string models;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "occ-out";
  Protocol protocol;
};

RunConfig parse_run_config(std::istream& in, const std::string& base_dir = "");
RunConfig load_run_config(const std::string& path);

/// Load every dataset table named in the config.
std::vector<DatasetSpec> load_datasets(const RunConfig& config);

}  // namespace occ
