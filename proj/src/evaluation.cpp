#include "occ/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "occ/errors.hpp"
#include "occ/rng.hpp"

namespace occ {

ConfusionCounts confusion(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw DataError("confusion: label vectors differ in length");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool normal = truth[i] == kTarget;
    const bool said_normal = predicted[i] == kTarget;
    if (normal && said_normal) {
      ++c.tp;
    } else if (!normal && said_normal) {
      ++c.fp;
    } else if (!normal) {
      ++c.tn;
    } else {
      ++c.fn;
    }
  }
  return c;
}

namespace {
double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

Metrics metrics(const ConfusionCounts& c) {
  Metrics m;
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.specificity = ratio(c.tn, c.tn + c.fp);
  const double pr = m.precision + m.recall;
  m.f1 = pr == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / pr;
  m.gmean = std::sqrt(m.recall * m.specificity);
  return m;
}

std::vector<Fold> cv_splits(const TransactionTable& train, int k, std::uint64_t seed) {
  if (k < 2) throw UsageError("cv_splits: need at least 2 folds");
  auto targets = train.indices_of(kTarget);
  const auto outliers = train.indices_of(kOutlier);
  if (targets.size() < static_cast<std::size_t>(k)) {
    throw DataError("cv_splits: " + std::to_string(targets.size()) + " target rows cannot fill " +
                    std::to_string(k) + " folds");
  }
  if (outliers.empty()) {
    throw DataError("G-mean undefined without negatives in validation: training pool has no outlier rows");
  }
  Rng rng(seed);
  rng.shuffle(targets);
  const std::size_t n = targets.size();
  const auto kk = static_cast<std::size_t>(k);
  std::vector<Fold> folds(kk);
  std::size_t start = 0;
  for (std::size_t f = 0; f < kk; ++f) {
    const std::size_t size = n / kk + (f < n % kk ? 1 : 0);
    for (std::size_t t = 0; t < n; ++t) {
      (t >= start && t < start + size ? folds[f].validation_idx : folds[f].fit_idx).push_back(targets[t]);
    }
    std::sort(folds[f].fit_idx.begin(), folds[f].fit_idx.end());
    folds[f].validation_idx.insert(folds[f].validation_idx.end(), outliers.begin(), outliers.end());
    std::sort(folds[f].validation_idx.begin(), folds[f].validation_idx.end());
    start += size;
  }
  return folds;
}

std::vector<TrainConfig> expand_grid(const TrainConfig& base, const HyperGrid& grid,
                                     Eigen::Index max_dims) {
  const bool uses_d = base.uses_projection();
  const bool uses_beta = base.family == Family::ssvdd && base.psi != Psi::psi0;
  const bool uses_eta = base.uses_projection() && base.solver == Solver::gradient;
  const bool uses_sigma = base.sigma.has_value();

  const auto axis = [](bool used, const auto& values, auto fallback) {
    using T = typename std::decay_t<decltype(values)>::value_type;
    return used ? values : std::vector<T>{static_cast<T>(fallback)};
  };
  std::vector<int> ds;
  for (int d : axis(uses_d, grid.d, base.d)) {
    if (!uses_d || d <= max_dims) ds.push_back(d);
  }
  std::vector<TrainConfig> out;
  for (double c : grid.C) {
    for (int d : ds) {
      for (double beta : axis(uses_beta, grid.beta, base.beta)) {
        for (double eta : axis(uses_eta, grid.eta, base.eta)) {
          for (double sigma : axis(uses_sigma, grid.sigma, base.sigma.value_or(1.0))) {
            TrainConfig cfg = base;
            cfg.C = c;
            cfg.d = d;
            cfg.beta = beta;
            cfg.eta = eta;
            if (uses_sigma) cfg.sigma = sigma;
            out.push_back(cfg);
          }
        }
      }
    }
  }
  return out;
}

namespace {

template <typename Fn>
void for_each_index(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

bool preferred(const CvRow& candidate, const CvRow& incumbent) {
  if (candidate.mean_gmean != incumbent.mean_gmean) return candidate.mean_gmean > incumbent.mean_gmean;
  const int cand_d = candidate.config.uses_projection() ? candidate.config.d : 0;
  const int inc_d = incumbent.config.uses_projection() ? incumbent.config.d : 0;
  if (cand_d != inc_d) return cand_d < inc_d;
  return candidate.config.C < incumbent.config.C;
}

GridResult grid_search(const TransactionTable& train_pool, const NormStats& stats,
                       const std::vector<TrainConfig>& lattice, std::uint64_t seed,
                       const GridOptions& options) {
  if (lattice.empty()) throw UsageError("grid_search: empty hyperparameter grid");
  const std::vector<Fold> folds = cv_splits(train_pool, options.folds, seed);

  GridResult result;
  result.table.resize(lattice.size());
  std::vector<std::exception_ptr> errors(lattice.size());
  for_each_index(lattice.size(), options.threads, [&](std::size_t c) {
    CvRow& row = result.table[c];
    row.config = lattice[c];
    try {
      double sum = 0.0;
      for (const Fold& fold : folds) {
        const TransactionTable fit = train_pool.subset(fold.fit_idx);
        if (options.on_fit) options.on_fit(fit);
        const TrainedModel model = train(row.config, fit, stats);
        const TransactionTable val = train_pool.subset(fold.validation_idx);
        const double g = metrics(confusion(val.labels, predict(model, val).labels)).gmean;
        row.fold_gmeans.push_back(g);
        sum += g;
      }
      row.mean_gmean = sum / static_cast<double>(folds.size());
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
      row.mean_gmean = 0.0;
      errors[c] = std::current_exception();
    }
  });

  std::ptrdiff_t best = -1;
  for (std::size_t c = 0; c < result.table.size(); ++c) {
    const CvRow& row = result.table[c];
    if (errors[c]) continue;
    if (best < 0) {
      best = static_cast<std::ptrdiff_t>(c);
      continue;
    }
    if (preferred(row, result.table[static_cast<std::size_t>(best)])) best = static_cast<std::ptrdiff_t>(c);
  }
  if (best < 0) {
    for (auto it = errors.rbegin(); it != errors.rend(); ++it) {
      if (*it) std::rethrow_exception(*it);
    }
  }
  result.best_index = static_cast<std::size_t>(best);
  result.best = result.table[result.best_index].config;
  result.best_mean = result.table[static_cast<std::size_t>(best)].mean_gmean;
  return result;
}

namespace {
std::string fmt_g(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}
std::string fmt_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}
}  // namespace

std::string describe_hyperparameters(const TrainConfig& cfg) {
  std::string out = (cfg.family == Family::ocsvm ? "nu=" : "C=") + fmt_g(cfg.C);
  if (cfg.uses_projection()) out += " d=" + fmt_g(cfg.d);
  if (cfg.family == Family::ssvdd && cfg.psi != Psi::psi0) out += " beta=" + fmt_g(cfg.beta);
  if (cfg.uses_projection() && cfg.solver == Solver::gradient) out += " eta=" + fmt_g(cfg.eta);
  if (cfg.sigma) out += " sigma=" + fmt_g(*cfg.sigma);
  return out;
}

void write_cv_table(std::ostream& out, const GridResult& result) {
  std::size_t folds = 0;
  for (const auto& row : result.table) folds = std::max(folds, row.fold_gmeans.size());
  out << "C,d,beta,eta,sigma";
  for (std::size_t f = 0; f < folds; ++f) out << ",fold" << f + 1;
  out << ",mean_gmean,selected,status\n";
  for (const auto& row : result.table) {
    const TrainConfig& c = row.config;
    out << fmt_exact(c.C) << ',' << c.d << ',' << fmt_exact(c.beta) << ',' << fmt_exact(c.eta) << ','
        << (c.sigma ? fmt_exact(*c.sigma) : std::string("none"));
    for (std::size_t f = 0; f < folds; ++f) {
      out << ',' << (f < row.fold_gmeans.size() ? fmt_exact(row.fold_gmeans[f]) : std::string());
    }
    const bool selected = static_cast<std::size_t>(&row - result.table.data()) == result.best_index;
    out << ',' << fmt_exact(row.mean_gmean) << ',' << (selected ? 1 : 0) << ',' << quote(row.status)
        << '\n';
  }
}

// ---- benchmark --------------------------------------------------------------

double EvalReport::average_gmean(const std::string& spec) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : rows) {
    if (row.spec == spec) {
      sum += row.metrics.gmean;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

void EvalReport::mark_best() {
  for (const auto& ds : datasets) {
    double top = -1.0;
    for (const auto& row : rows) {
      if (row.dataset == ds && row.status == "ok") top = std::max(top, row.metrics.gmean);
    }
    for (auto& row : rows) {
      if (row.dataset == ds) row.best = row.status == "ok" && row.metrics.gmean == top;
    }
  }
}

bool EvalReport::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.status != "ok"; });
}

namespace {

// splitmix64 finalizer: decorrelates the per-dataset / per-stage seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a * 1315423911ULL + b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

PreparedDataset prepare_dataset(const DatasetSpec& dataset, const Protocol& protocol,
                                std::uint64_t seed, std::size_t index) {
  dataset.table.validate();
  auto [train, test] = split(dataset.table, protocol.test_fraction, derive_seed(seed, index, 0));
  PreparedDataset out;
  out.name = dataset.name;
  out.stats = fit_norm_stats(train);
  out.pool = resample(train, {dataset.n_target, dataset.n_outlier, derive_seed(seed, index, 1)});
  out.test = std::move(test);
  return out;
}

CellResult evaluate_cell(const ModelSpec& spec, const PreparedDataset& data, const Protocol& protocol,
                         std::uint64_t seed, std::size_t index) {
  TrainConfig base = base_config(spec);
  base.iterations = protocol.iterations;
  base.knn_k = protocol.knn_k;
  const auto folds = static_cast<std::size_t>(std::max(protocol.grid_options.folds, 1));
  const std::size_t targets = data.pool.count(kTarget);
  const auto n_fit = static_cast<Eigen::Index>(targets - (targets + folds - 1) / folds);
  // The NPT map has at most N_fit - 1 dimensions; the linear one has D.
  const Eigen::Index max_dims =
      spec.kernel ? n_fit - 1 : std::min<Eigen::Index>(data.pool.features.cols(), n_fit);
  const auto lattice = expand_grid(base, protocol.grid, max_dims);
  if (lattice.empty()) throw UsageError("hyperparameter grid is empty after dimension filtering");

  CellResult cell;
  cell.grid = grid_search(data.pool, data.stats, lattice, derive_seed(seed, index, 2),
                          protocol.grid_options);
  cell.model = train(cell.grid.best, data.pool.targets(), data.stats);
  cell.test_metrics = metrics(confusion(data.test.labels, predict(cell.model, data.test).labels));
  return cell;
}

EvalReport run_benchmark(const std::vector<ModelSpec>& specs, const std::vector<DatasetSpec>& datasets,
                         const Protocol& protocol, std::uint64_t seed,
                         std::vector<BenchmarkCell>* cells) {
  if (specs.empty()) throw UsageError("no models specified");
  if (datasets.empty()) throw UsageError("no datasets specified");
  EvalReport report;
  for (const auto& ds : datasets) report.datasets.push_back(ds.name);

  std::vector<std::optional<PreparedDataset>> prepared(datasets.size());
  std::vector<std::string> prep_errors(datasets.size());
  for (std::size_t di = 0; di < datasets.size(); ++di) {
    try {
      prepared[di] = prepare_dataset(datasets[di], protocol, seed, di);
    } catch (const std::exception& e) {
      prep_errors[di] = e.what();
    }
  }

  for (const ModelSpec& spec : specs) {
    for (std::size_t di = 0; di < datasets.size(); ++di) {
      ReportRow row;
      row.model = display_name(spec);
      row.spec = format_model_spec(spec);
      row.kernel = spec.kernel;
      row.dataset = datasets[di].name;
      try {
        if (!prepared[di]) throw DataError(prep_errors[di]);
        CellResult cell = evaluate_cell(spec, *prepared[di], protocol, seed, di);
        row.metrics = cell.test_metrics;
        row.hyperparameters = describe_hyperparameters(cell.grid.best);
        if (cells) cells->push_back({spec, datasets[di].name, std::move(cell.grid)});
      } catch (const std::exception& e) {
        row.status = std::string("failed: ") + e.what();
        row.metrics = Metrics{};
      }
      report.rows.push_back(std::move(row));
    }
  }
  report.mark_best();
  return report;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "model,dataset,precision,f1,gmean,best,avg_gmean,spec,hyperparameters,status\n";
  for (const auto& row : report.rows) {
    out << row.model << ',' << row.dataset << ',' << fmt_exact(row.metrics.precision) << ','
        << fmt_exact(row.metrics.f1) << ',' << fmt_exact(row.metrics.gmean) << ',' << (row.best ? 1 : 0)
        << ',' << fmt_exact(report.average_gmean(row.spec)) << ',' << row.spec << ','
        << quote(row.hyperparameters) << ',' << quote(row.status) << '\n';
  }
}

EvalReport read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("report: empty file");
  const auto header = csv::split_line(line);
  const std::vector<std::string> expected{"model", "dataset", "precision", "f1", "gmean", "best",
                                          "avg_gmean", "spec", "hyperparameters", "status"};
  if (header != expected) throw DataError("report: unexpected header '" + line + "'");
  EvalReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::split_line(line);
    if (f.size() != expected.size()) {
      throw DataError("report line " + std::to_string(line_no) + ": expected " +
                      std::to_string(expected.size()) + " fields");
    }
    ReportRow row;
    row.model = f[0];
    row.dataset = f[1];
    if (!csv::parse_double(f[2], row.metrics.precision) || !csv::parse_double(f[3], row.metrics.f1) ||
        !csv::parse_double(f[4], row.metrics.gmean)) {
      throw DataError("report line " + std::to_string(line_no) + ": bad metric value");
    }
    row.best = f[5] == "1";
    row.spec = f[7];
    row.kernel = row.spec.size() > 4 && row.spec.compare(row.spec.size() - 4, 4, "-rbf") == 0;
    row.hyperparameters = f[8];
    row.status = f[9];
    if (std::find(report.datasets.begin(), report.datasets.end(), row.dataset) == report.datasets.end()) {
      report.datasets.push_back(row.dataset);
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

void write_report_text(std::ostream& out, const EvalReport& report) {
  std::vector<std::string> models;
  std::map<std::string, std::string> names;
  for (const auto& row : report.rows) {
    if (std::find(models.begin(), models.end(), row.spec) == models.end()) models.push_back(row.spec);
    names[row.spec] = row.model;
  }
  std::size_t width = 5;
  for (const auto& [spec, name] : names) width = std::max(width, name.size());
  std::size_t cell = 7;
  for (const auto& ds : report.datasets) cell = std::max(cell, (ds.size() + 2) / 3 + 1);

  const auto pad = [](const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
  };
  const auto num = [](double v, bool bold) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f%s", v, bold ? "*" : "");
    return std::string(buf);
  };

  out << pad("Model", width);
  for (const auto& ds : report.datasets) out << " | " << pad(ds, cell * 3 + 2);
  out << " | Avg G-m\n";
  out << pad("", width);
  for (std::size_t i = 0; i < report.datasets.size(); ++i) {
    out << " | " << pad("Pre", cell) << ' ' << pad("F1", cell) << ' ' << pad("G-m", cell);
  }
  out << " |\n";
  for (const auto& spec : models) {
    out << pad(names[spec], width);
    for (const auto& ds : report.datasets) {
      const auto it = std::find_if(report.rows.begin(), report.rows.end(), [&](const ReportRow& r) {
        return r.spec == spec && r.dataset == ds;
      });
      if (it == report.rows.end()) {
        out << " | " << pad("-", cell * 3 + 2);
      } else if (it->status != "ok") {
        out << " | " << pad("failed", cell * 3 + 2);
      } else {
        out << " | " << pad(num(it->metrics.precision, false), cell) << ' '
            << pad(num(it->metrics.f1, false), cell) << ' ' << pad(num(it->metrics.gmean, it->best), cell);
      }
    }
    out << " | " << num(report.average_gmean(spec), false) << '\n';
  }
  out << "(* = highest G-mean for the dataset)\n";
}

}  // namespace occ
