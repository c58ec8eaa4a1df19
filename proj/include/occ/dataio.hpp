#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace occ {

/// Label of the target (normal, genuine) class.
inline constexpr int kTarget = 0;
/// Label of the outlier (fraud) class.
inline constexpr int kOutlier = 1;

/// Floor applied to per-feature standard deviations.
inline constexpr double kStdFloor = 1e-8;

/// Feature matrix (one row per transaction) with 0/1 labels.
struct TransactionTable {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::string name;
  std::vector<std::string> columns;

  std::size_t rows() const { return labels.size(); }
  std::size_t dims() const { return static_cast<std::size_t>(features.cols()); }
  std::size_t count(int label) const;
  std::vector<std::size_t> indices_of(int label) const;

  /// Throws DataError if the shape, labels or values are invalid.
  void validate() const;

  /// Rows at `idx`, in the given order.
  TransactionTable subset(const std::vector<std::size_t>& idx) const;
  /// Only the target-class rows.
  TransactionTable targets() const { return subset(indices_of(kTarget)); }
};

struct NormStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
};

struct ResampleSpec {
  std::size_t n_target = 0;
  std::size_t n_outlier = 0;
  std::uint64_t seed = 0;
};

struct LoadOptions {
  std::string label_column = "label";
  /// Columns skipped entirely (identifiers, timestamps, categorical fields).
  std::vector<std::string> drop_columns;
  std::string name;
};

/// Parse a CSV with a header row. Every non-label, non-dropped column must be
/// numeric; the label column must hold exactly "0" or "1".
TransactionTable load_table(const std::string& path, const LoadOptions& options);
TransactionTable load_table(const std::string& path, const std::string& label_column);

/// Stratified split. Each class contributes round_half_up(test_fraction * n_c)
/// rows to the test part, capped at n_c - 1 when n_c >= 2 so that every
/// populated class keeps a training row. Both parts keep source row order.
std::pair<TransactionTable, TransactionTable> split(const TransactionTable& table,
                                                    double test_fraction, std::uint64_t seed);

/// Per-class uniform sampling without replacement; output keeps source order.
TransactionTable resample(const TransactionTable& train, const ResampleSpec& spec);

/// Mean and sample (N-1) standard deviation over target rows, floored at kStdFloor.
NormStats fit_norm_stats(const TransactionTable& table);

TransactionTable normalize(const TransactionTable& table, const NormStats& stats);
Eigen::MatrixXd normalize(const Eigen::MatrixXd& features, const NormStats& stats);
Eigen::MatrixXd denormalize(const Eigen::MatrixXd& features, const NormStats& stats);

/// Half-up rounding used by the split rule.
std::size_t round_half_up(double x);

}  // namespace occ

namespace occ::csv {

/// Split one CSV record on commas. Double-quoted fields may contain commas;
/// surrounding whitespace and a trailing '\r' are stripped.
std::vector<std::string> split_line(const std::string& line);

/// Strict decimal parse of a whole field; false on any trailing garbage.
bool parse_double(const std::string& field, double& out);

}  // namespace occ::csv
