#include "occ/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "occ/errors.hpp"
#include "occ/rng.hpp"

namespace occ {

namespace csv {

namespace {
std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}
}  // namespace

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(std::move(cur)));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(trim(std::move(cur)));
  return fields;
}

bool parse_double(const std::string& field, double& out) {
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace csv

std::size_t TransactionTable::count(int label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

std::vector<std::size_t> TransactionTable::indices_of(int label) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) idx.push_back(i);
  }
  return idx;
}

void TransactionTable::validate() const {
  if (labels.empty() || features.cols() == 0) {
    throw DataError("table '" + name + "' is empty");
  }
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("table '" + name + "': label count does not match feature rows");
  }
  for (int l : labels) {
    if (l != kTarget && l != kOutlier) throw DataError("table '" + name + "': label not 0/1");
  }
  if (!features.allFinite()) throw DataError("table '" + name + "': non-finite feature value");
}

TransactionTable TransactionTable::subset(const std::vector<std::size_t>& idx) const {
  TransactionTable out;
  out.name = name;
  out.columns = columns;
  out.features.resize(static_cast<Eigen::Index>(idx.size()), features.cols());
  out.labels.reserve(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(idx[r]));
    out.labels.push_back(labels[idx[r]]);
  }
  return out;
}

TransactionTable load_table(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line) || csv::split_line(line) == std::vector<std::string>{""}) {
    throw DataError("empty file: '" + path + "' has no header row");
  }
  const auto header = csv::split_line(line);

  std::ptrdiff_t label_col = -1;
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == options.label_column) {
      label_col = static_cast<std::ptrdiff_t>(c);
    } else if (std::find(options.drop_columns.begin(), options.drop_columns.end(), header[c]) ==
               options.drop_columns.end()) {
      feature_cols.push_back(c);
      feature_names.push_back(header[c]);
    }
  }
  if (label_col < 0) {
    throw DataError("label column not found: '" + options.label_column + "' in '" + path + "'");
  }
  if (feature_cols.empty()) throw DataError("no feature columns in '" + path + "'");

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = csv::split_line(line);
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": expected " << header.size() << " fields, found "
          << fields.size();
      throw DataError(msg.str());
    }
    const std::string& lab = fields[static_cast<std::size_t>(label_col)];
    double lab_value = 0.0;
    if (!csv::parse_double(lab, lab_value)) lab_value = -1.0;
    if (lab_value == 0.0) {
      labels.push_back(kTarget);
    } else if (lab_value == 1.0) {
      labels.push_back(kOutlier);
    } else {
      std::ostringstream msg;
      msg << path << ":" << line_no << ": label column '" << options.label_column
          << "' must be 0 or 1, found '" << lab << "'";
      throw DataError(msg.str());
    }
    for (std::size_t c : feature_cols) {
      double v = 0.0;
      if (!csv::parse_double(fields[c], v)) {
        std::ostringstream msg;
        msg << path << ":" << line_no << ": non-numeric cell in column '" << header[c] << "': '"
            << fields[c] << "'";
        throw DataError(msg.str());
      }
      values.push_back(v);
    }
  }
  if (labels.empty()) throw DataError("empty file: '" + path + "' has no data rows");

  TransactionTable table;
  table.name = options.name.empty() ? path : options.name;
  table.columns = std::move(feature_names);
  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto d = static_cast<Eigen::Index>(feature_cols.size());
  table.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, d);
  table.labels = std::move(labels);
  return table;
}

TransactionTable load_table(const std::string& path, const std::string& label_column) {
  LoadOptions options;
  options.label_column = label_column;
  return load_table(path, options);
}

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

std::pair<TransactionTable, TransactionTable> split(const TransactionTable& table,
                                                    double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw UsageError("test_fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (int label : {kTarget, kOutlier}) {
    auto idx = table.indices_of(label);
    const std::size_t n = idx.size();
    std::size_t n_test = round_half_up(test_fraction * static_cast<double>(n));
    if (n >= 2) n_test = std::min(n_test, n - 1);
    rng.shuffle(idx);
    test_idx.insert(test_idx.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    train_idx.insert(train_idx.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {table.subset(train_idx), table.subset(test_idx)};
}

TransactionTable resample(const TransactionTable& train, const ResampleSpec& spec) {
  if (spec.n_target < 1) throw UsageError("resample: n_target must be >= 1");
  Rng rng(spec.seed);
  std::vector<std::size_t> keep;
  for (const auto& [label, want] : {std::pair{kTarget, spec.n_target}, std::pair{kOutlier, spec.n_outlier}}) {
    auto idx = train.indices_of(label);
    if (want > idx.size()) {
      std::ostringstream msg;
      msg << "resample: requested " << want << (label == kTarget ? " target" : " outlier")
          << " rows but only " << idx.size() << " available";
      throw DataError(msg.str());
    }
    rng.shuffle(idx);
    keep.insert(keep.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(want));
  }
  std::sort(keep.begin(), keep.end());
  return train.subset(keep);
}

NormStats fit_norm_stats(const TransactionTable& table) {
  const auto idx = table.indices_of(kTarget);
  if (idx.size() < 2) throw DataError("fit_norm_stats: need at least 2 target rows");
  const auto d = table.features.cols();
  NormStats stats{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  for (std::size_t i : idx) stats.mean += table.features.row(static_cast<Eigen::Index>(i)).transpose();
  stats.mean /= static_cast<double>(idx.size());
  for (std::size_t i : idx) {
    stats.std += (table.features.row(static_cast<Eigen::Index>(i)).transpose() - stats.mean)
                     .cwiseAbs2();
  }
  stats.std = (stats.std / static_cast<double>(idx.size() - 1)).cwiseSqrt().cwiseMax(kStdFloor);
  return stats;
}

Eigen::MatrixXd normalize(const Eigen::MatrixXd& features, const NormStats& stats) {
  if (features.cols() != stats.mean.size()) {
    std::ostringstream msg;
    msg << "normalize: dimension mismatch, stats have " << stats.mean.size()
        << " features but data has " << features.cols();
    throw DataError(msg.str());
  }
  return (features.rowwise() - stats.mean.transpose()).array().rowwise() /
         stats.std.transpose().array();
}

TransactionTable normalize(const TransactionTable& table, const NormStats& stats) {
  TransactionTable out = table;
  out.features = normalize(table.features, stats);
  return out;
}

Eigen::MatrixXd denormalize(const Eigen::MatrixXd& features, const NormStats& stats) {
  if (features.cols() != stats.mean.size()) throw DataError("denormalize: dimension mismatch");
  Eigen::MatrixXd out = features.array().rowwise() * stats.std.transpose().array();
  return out.rowwise() + stats.mean.transpose();
}

}  // namespace occ
