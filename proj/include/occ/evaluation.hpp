#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "occ/dataio.hpp"
#include "occ/model_spec.hpp"
#include "occ/subspace.hpp"

namespace occ {

/// Counts with the normal (target) class as the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;  // normal predicted normal
  std::size_t fp = 0;  // fraud predicted normal
  std::size_t tn = 0;  // fraud predicted fraud
  std::size_t fn = 0;  // normal predicted fraud

  std::size_t total() const { return tp + fp + tn + fn; }
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double specificity = 0.0;
  double gmean = 0.0;
};

ConfusionCounts confusion(const std::vector<int>& truth, const std::vector<int>& predicted);

/// Zero denominators yield 0 for the affected metric.
Metrics metrics(const ConfusionCounts& counts);

struct Fold {
  std::vector<std::size_t> fit_idx;         // target rows only
  std::vector<std::size_t> validation_idx;  // held-out targets + every outlier row
};

/// Target rows shuffled and dealt into k folds (sizes differ by at most one);
/// outliers are only ever used for validation.
std::vector<Fold> cv_splits(const TransactionTable& train, int k, std::uint64_t seed);

/// Hyperparameter lattice. Only the axes relevant to a model are expanded.
struct HyperGrid {
  std::vector<double> C{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<int> d{1, 2, 3, 4, 5, 10, 20};
  std::vector<double> beta{0.01, 0.1, 1, 10, 100};
  std::vector<double> eta{0.1, 1, 10, 100, 1000};
  std::vector<double> sigma{0.1, 1, 10, 100, 1000};
};

/// Concrete configurations for `base` in lattice order (C, d, beta, eta,
/// sigma; last axis fastest). d values above `max_dims` are skipped.
std::vector<TrainConfig> expand_grid(const TrainConfig& base, const HyperGrid& grid,
                                     Eigen::Index max_dims);

struct CvRow {
  TrainConfig config;
  std::vector<double> fold_gmeans;
  double mean_gmean = 0.0;
  std::string status = "ok";
};

struct GridResult {
  TrainConfig best;
  std::size_t best_index = 0;
  double best_mean = 0.0;
  std::vector<CvRow> table;
};

struct GridOptions {
  int folds = 5;
  /// Worker threads for grid cells; 0 or 1 runs sequentially.
  int threads = 0;
  /// Called with every table handed to train() (audit hook).
  std::function<void(const TransactionTable&)> on_fit;
};

/// Selection order between two successful rows: higher mean G-mean, then
/// smaller d (projection models only), then smaller C. Returns false on a
/// full tie so the earlier lattice entry is kept.
bool preferred(const CvRow& candidate, const CvRow& incumbent);

/// k-fold CV over the lattice; picks the highest mean validation G-mean with
/// ties going to smaller d, then smaller C, then lattice order.
GridResult grid_search(const TransactionTable& train, const NormStats& stats,
                       const std::vector<TrainConfig>& lattice, std::uint64_t seed,
                       const GridOptions& options = {});

/// Human-readable hyperparameters of a config, e.g. "C=0.1 d=2 eta=10".
std::string describe_hyperparameters(const TrainConfig& cfg);

void write_cv_table(std::ostream& out, const GridResult& result);

// ---- benchmark --------------------------------------------------------------

struct DatasetSpec {
  std::string name;
  TransactionTable table;
  std::size_t n_target = 0;
  std::size_t n_outlier = 0;
};

struct Protocol {
  double test_fraction = 0.3;
  HyperGrid grid;
  GridOptions grid_options;
  int iterations = 5;
  int knn_k = kDefaultNeighbors;
};

struct ReportRow {
  std::string model;  // display name
  std::string spec;   // canonical spec string
  bool kernel = false;
  std::string dataset;
  Metrics metrics;
  bool best = false;
  std::string status = "ok";
  std::string hyperparameters;
};

struct EvalReport {
  std::vector<ReportRow> rows;
  std::vector<std::string> datasets;  // column order

  /// Mean G-mean of a model over the listed datasets (failed cells count as 0).
  double average_gmean(const std::string& spec) const;
  /// Set `best` on every row holding the top G-mean of its dataset.
  void mark_best();
  bool any_failed() const;
};

struct BenchmarkCell {
  ModelSpec spec;
  std::string dataset;
  GridResult grid;
};

/// One dataset after the split / resample stage of the protocol.
struct PreparedDataset {
  std::string name;
  TransactionTable pool;  // resampled training rows (targets + outliers)
  TransactionTable test;
  NormStats stats;        // from the training-split targets before resampling
};

/// Stratified split, statistics from the training-split targets, then
/// resampling to the requested class counts. `index` decorrelates seeds
/// between datasets.
PreparedDataset prepare_dataset(const DatasetSpec& dataset, const Protocol& protocol,
                                std::uint64_t seed, std::size_t index);

struct CellResult {
  GridResult grid;
  TrainedModel model;
  Metrics test_metrics;
};

/// Grid-search one model on a prepared dataset, refit on every resampled
/// target row with the winning configuration and score the test split.
CellResult evaluate_cell(const ModelSpec& spec, const PreparedDataset& data, const Protocol& protocol,
                         std::uint64_t seed, std::size_t index);

/// Split, resample, normalize with pre-resampling target statistics,
/// grid-search, refit on every resampled target and score the test split.
/// Per-cell failures are recorded in the report and the run continues.
EvalReport run_benchmark(const std::vector<ModelSpec>& specs, const std::vector<DatasetSpec>& datasets,
                         const Protocol& protocol, std::uint64_t seed,
                         std::vector<BenchmarkCell>* cells = nullptr);

/// CSV: model,dataset,precision,f1,gmean,best,avg_gmean,spec,status
void write_report_csv(std::ostream& out, const EvalReport& report);
EvalReport read_report_csv(std::istream& in);

/// Aligned table: one row per model, Pre/F1/G-m per dataset, average column.
void write_report_text(std::ostream& out, const EvalReport& report);

}  // namespace occ
