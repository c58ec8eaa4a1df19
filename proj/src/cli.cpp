#include "occ/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "occ/dataio.hpp"
#include "occ/errors.hpp"
#include "occ/evaluation.hpp"
#include "occ/model_io.hpp"
#include "occ/model_spec.hpp"
#include "occ/run_config.hpp"

namespace occ {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::string model;
  std::string out;
  std::string dataset;
  std::string input;
  std::vector<std::string> reports;
  std::optional<std::uint64_t> seed;
};

int threads_from_env() {
  const char* v = std::getenv("OCC_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0) throw UsageError("OCC_THREADS must be a non-negative integer");
  return static_cast<int>(n);
}

RunConfig resolve_config(const Options& opt) {
  RunConfig cfg = load_run_config(opt.config);
  if (opt.seed) cfg.seed = opt.seed;
  if (!cfg.seed) throw UsageError("a seed is required (config key 'seed' or --seed)");
  cfg.protocol.grid_options.threads = threads_from_env();
  return cfg;
}

std::string file_stem(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  }
  return s;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write '" + path.string() + "'");
  f << content;
}

int cmd_train(const Options& opt, std::ostream& out, std::ostream& log) {
  const ModelSpec spec = parse_model_spec(opt.model);
  const RunConfig cfg = resolve_config(opt);
  if (cfg.datasets.empty()) throw UsageError("config lists no datasets");
  std::size_t pick = 0;
  if (!opt.dataset.empty()) {
    while (pick < cfg.datasets.size() && cfg.datasets[pick].name != opt.dataset &&
           cfg.datasets[pick].id != opt.dataset) {
      ++pick;
    }
    if (pick == cfg.datasets.size()) throw UsageError("unknown dataset '" + opt.dataset + "'");
  }
  RunConfig one = cfg;
  one.datasets = {cfg.datasets[pick]};
  const DatasetSpec ds = std::move(load_datasets(one).front());
  log << "phase=load dataset=" << ds.name << " rows=" << ds.table.rows() << " dims=" << ds.table.dims()
      << " outliers=" << ds.table.count(kOutlier) << '\n';

  const PreparedDataset data = prepare_dataset(ds, cfg.protocol, *cfg.seed, pick);
  log << "phase=resample pool_targets=" << data.pool.count(kTarget)
      << " pool_outliers=" << data.pool.count(kOutlier) << " test_rows=" << data.test.rows() << '\n';
  const CellResult cell = evaluate_cell(spec, data, cfg.protocol, *cfg.seed, pick);
  for (const auto& w : cell.model.warnings) log << "phase=train warning=\"" << w << "\"\n";

  const fs::path model_path = opt.out.empty()
                                  ? fs::path(cfg.out_dir) / (file_stem(format_model_spec(spec)) + ".model")
                                  : fs::path(opt.out);
  if (model_path.has_parent_path()) fs::create_directories(model_path.parent_path());
  save_model_file(model_path.string(), cell.model);
  const fs::path cv_path = model_path.string() + ".cv.csv";
  std::ostringstream cv;
  write_cv_table(cv, cell.grid);
  write_file(cv_path, cv.str());
  log << "phase=done model=" << model_path.string() << '\n';

  out << "model " << format_model_spec(spec) << '\n'
      << "selected " << describe_hyperparameters(cell.grid.best) << '\n'
      << "cv_mean_gmean " << cell.grid.best_mean << '\n'
      << "test precision=" << cell.test_metrics.precision << " f1=" << cell.test_metrics.f1
      << " gmean=" << cell.test_metrics.gmean << '\n'
      << "model_file " << model_path.string() << '\n'
      << "cv_table " << cv_path.string() << '\n';
  return kExitOk;
}

int cmd_benchmark(const Options& opt, std::ostream& out, std::ostream& log) {
  const RunConfig cfg = resolve_config(opt);
  const auto specs = expand_model_list(cfg.models);
  const auto datasets = load_datasets(cfg);
  for (const auto& ds : datasets) {
    log << "phase=load dataset=" << ds.name << " rows=" << ds.table.rows() << " dims=" << ds.table.dims()
        << " outliers=" << ds.table.count(kOutlier) << '\n';
  }
  log << "phase=benchmark models=" << specs.size() << " datasets=" << datasets.size() << '\n';

  std::vector<BenchmarkCell> cells;
  const EvalReport report = run_benchmark(specs, datasets, cfg.protocol, *cfg.seed, &cells);

  const fs::path dir = opt.out.empty() ? fs::path(cfg.out_dir) : fs::path(opt.out);
  fs::create_directories(dir / "cv");
  for (bool kernel : {false, true}) {
    EvalReport part;
    part.datasets = report.datasets;
    for (const auto& row : report.rows) {
      if (row.kernel == kernel) part.rows.push_back(row);
    }
    part.mark_best();
    const std::string stem = kernel ? "report_kernel" : "report_linear";
    std::ostringstream csv_out;
    std::ostringstream txt_out;
    write_report_csv(csv_out, part);
    write_report_text(txt_out, part);
    write_file(dir / (stem + ".csv"), csv_out.str());
    write_file(dir / (stem + ".txt"), txt_out.str());
    if (!part.rows.empty()) out << txt_out.str() << '\n';
  }
  for (const auto& cell : cells) {
    std::ostringstream cv;
    write_cv_table(cv, cell.grid);
    write_file(dir / "cv" / (file_stem(format_model_spec(cell.spec)) + "__" + file_stem(cell.dataset) + ".csv"),
               cv.str());
  }
  for (const auto& row : report.rows) {
    if (row.status != "ok") log << "phase=benchmark cell=" << row.spec << "/" << row.dataset << " " << row.status << '\n';
  }
  log << "phase=done out=" << dir.string() << '\n';
  return report.any_failed() ? kExitNumerical : kExitOk;
}

int cmd_score(const Options& opt, std::ostream& out, std::ostream& log) {
  const TrainedModel model = load_model_file(opt.model);
  std::ifstream in(opt.input);
  if (!in) throw DataError("cannot open '" + opt.input + "'");
  std::ofstream file_out;
  if (!opt.out.empty()) {
    file_out.open(opt.out, std::ios::binary);
    if (!file_out) throw DataError("cannot write '" + opt.out + "'");
  }
  std::ostream& sink = opt.out.empty() ? out : file_out;

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: '" + opt.input + "' has no header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = csv::split_line(line);
  const auto dims = static_cast<std::size_t>(model.input_dims());

  std::vector<std::size_t> cols;
  if (!model.columns.empty()) {
    for (const auto& name : model.columns) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it != header.end()) cols.push_back(static_cast<std::size_t>(it - header.begin()));
    }
  } else if (header.size() == dims) {
    for (std::size_t c = 0; c < dims; ++c) cols.push_back(c);
  }
  if (cols.size() != dims) {
    std::ostringstream msg;
    msg << "schema mismatch: model expects " << dims << " feature columns, found "
        << (model.columns.empty() ? header.size() : cols.size());
    throw DataError(msg.str());
  }

  sink << line << ",score,predicted_label\n";
  std::size_t line_no = 1;
  std::size_t rows = 0;
  std::size_t flagged = 0;
  Eigen::MatrixXd x(1, static_cast<Eigen::Index>(dims));
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = csv::split_line(line);
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << opt.input << ":" << line_no << ": expected " << header.size() << " fields, found "
          << fields.size();
      throw DataError(msg.str());
    }
    for (std::size_t c = 0; c < dims; ++c) {
      double v = 0.0;
      if (!csv::parse_double(fields[cols[c]], v)) {
        throw DataError(opt.input + ":" + std::to_string(line_no) + ": non-numeric cell in column '" +
                        header[cols[c]] + "'");
      }
      x(0, static_cast<Eigen::Index>(c)) = v;
    }
    const Prediction p = predict(model, x);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", p.scores(0));
    sink << line << ',' << buf << ',' << p.labels[0] << '\n';
    ++rows;
    flagged += static_cast<std::size_t>(p.labels[0]);
  }
  log << "phase=score rows=" << rows << " flagged=" << flagged << '\n';
  return kExitOk;
}

int cmd_report(const Options& opt, std::ostream& out, std::ostream&) {
  std::ostringstream text;
  for (const auto& path : opt.reports) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open report '" + path + "'");
    EvalReport report = read_report_csv(in);
    report.mark_best();
    write_report_text(text, report);
  }
  if (opt.out.empty()) {
    out << text.str();
  } else {
    write_file(opt.out, text.str());
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& log) {
  CLI::App app{"One-class subspace SVDD toolkit"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;

  auto* train = app.add_subcommand("train", "Grid-search, fit and save one model");
  train->add_option("--config", opt.config, "Run configuration file")->required();
  train->add_option("--model", opt.model, "Model spec, e.g. gessvdd-knn-g-min")->required();
  train->add_option("--dataset", opt.dataset, "Dataset id or name (default: first)");
  train->add_option("--seed", seed, "Override the config seed");
  train->add_option("--out", opt.out, "Model file path");

  auto* bench = app.add_subcommand("benchmark", "Evaluate every configured model on every dataset");
  bench->add_option("--config", opt.config, "Run configuration file")->required();
  bench->add_option("--seed", seed, "Override the config seed");
  bench->add_option("--out", opt.out, "Output directory");

  auto* score = app.add_subcommand("score", "Append score and predicted_label columns to a CSV");
  score->add_option("--model", opt.model, "Model file")->required();
  score->add_option("input", opt.input, "CSV to score")->required();
  score->add_option("--out", opt.out, "Output CSV (default: stdout)");

  auto* report = app.add_subcommand("report", "Render report CSV files as aligned tables");
  report->add_option("reports", opt.reports, "Report CSV files")->required();
  report->add_option("--out", opt.out, "Output text file (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  for (auto* sub : {train, bench}) {
    if (sub->parsed() && sub->count("--seed") > 0) opt.seed = seed;
  }

  try {
    if (train->parsed()) return cmd_train(opt, out, log);
    if (bench->parsed()) return cmd_benchmark(opt, out, log);
    if (score->parsed()) return cmd_score(opt, out, log);
    return cmd_report(opt, out, log);
  } catch (const UsageError& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    log << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    log << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace occ
