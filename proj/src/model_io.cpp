#include "occ/model_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "occ/errors.hpp"
#include "occ/model_spec.hpp"

namespace occ {

namespace {

constexpr const char* kMagic = "occ-model";

std::string hex(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  return std::string(buf, res.ptr);
}

double parse_hex(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  bool negative = false;
  if (first != last && *first == '-') {
    negative = true;
    ++first;
  }
  const auto res = std::from_chars(first, last, v, std::chars_format::hex);
  if (res.ec != std::errc() || res.ptr != last) throw DataError("model file: bad number '" + s + "'");
  return negative ? -v : v;
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void text(const std::string& key, const std::string& value) { out_ << key << ' ' << value << '\n'; }
  void integer(const std::string& key, long long value) { out_ << key << ' ' << value << '\n'; }
  void real(const std::string& key, double value) { out_ << key << ' ' << hex(value) << '\n'; }
  void matrix(const std::string& key, const Eigen::MatrixXd& m) {
    out_ << "matrix " << key << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) out_ << (c ? " " : "") << hex(m(r, c));
      out_ << '\n';
    }
  }
  void indices(const std::string& key, const std::vector<std::size_t>& idx) {
    out_ << "indices " << key << ' ' << idx.size();
    for (std::size_t i : idx) out_ << ' ' << i;
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

struct Entries {
  std::map<std::string, std::string> scalars;
  std::map<std::string, Eigen::MatrixXd> matrices;
  std::map<std::string, std::vector<std::size_t>> index_sets;
  std::vector<std::string> columns;
  std::vector<std::string> warnings;

  const std::string& scalar(const std::string& key) const {
    auto it = scalars.find(key);
    if (it == scalars.end()) throw DataError("model file: missing key '" + key + "'");
    return it->second;
  }
  bool has(const std::string& key) const { return scalars.count(key) || matrices.count(key); }
  double real(const std::string& key) const { return parse_hex(scalar(key)); }
  long long integer(const std::string& key) const {
    try {
      return std::stoll(scalar(key));
    } catch (const std::logic_error&) {
      throw DataError("model file: bad integer for '" + key + "'");
    }
  }
  const Eigen::MatrixXd& matrix(const std::string& key) const {
    auto it = matrices.find(key);
    if (it == matrices.end()) throw DataError("model file: missing matrix '" + key + "'");
    return it->second;
  }
  Eigen::VectorXd vector(const std::string& key) const {
    const Eigen::MatrixXd& m = matrix(key);
    if (m.cols() != 1 && m.rows() != 0) throw DataError("model file: '" + key + "' is not a column");
    return m.col(0);
  }
  const std::vector<std::size_t>& index_set(const std::string& key) const {
    auto it = index_sets.find(key);
    if (it == index_sets.end()) throw DataError("model file: missing index set '" + key + "'");
    return it->second;
  }
};

Entries read_entries(std::istream& in) {
  Entries e;
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw DataError("not an occ model file");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto space = line.find(' ');
    const std::string key = line.substr(0, space);
    const std::string rest = space == std::string::npos ? "" : line.substr(space + 1);
    if (key == "end") return e;
    if (key == "matrix") {
      std::istringstream hdr(rest);
      std::string name;
      Eigen::Index rows = 0;
      Eigen::Index cols = 0;
      if (!(hdr >> name >> rows >> cols) || rows < 0 || cols < 0) {
        throw DataError("model file: bad matrix header '" + line + "'");
      }
      Eigen::MatrixXd m(rows, cols);
      for (Eigen::Index r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) throw DataError("model file: truncated matrix '" + name + "'");
        std::istringstream row(line);
        std::string tok;
        for (Eigen::Index c = 0; c < cols; ++c) {
          if (!(row >> tok)) throw DataError("model file: short row in matrix '" + name + "'");
          m(r, c) = parse_hex(tok);
        }
      }
      e.matrices[name] = std::move(m);
    } else if (key == "indices") {
      std::istringstream body(rest);
      std::string name;
      std::size_t count = 0;
      body >> name >> count;
      std::vector<std::size_t> idx(count);
      for (auto& i : idx) {
        if (!(body >> i)) throw DataError("model file: short index set '" + name + "'");
      }
      e.index_sets[name] = std::move(idx);
    } else if (key == "column") {
      e.columns.push_back(rest);
    } else if (key == "warning") {
      e.warnings.push_back(rest);
    } else {
      e.scalars[key] = rest;
    }
  }
  throw DataError("model file: missing 'end' marker");
}

ModelSpec spec_of(const TrainConfig& cfg) {
  ModelSpec spec;
  spec.family = cfg.family;
  spec.graph = cfg.graph;
  spec.solver = cfg.solver;
  spec.direction = cfg.direction;
  spec.psi = cfg.psi;
  spec.kernel = cfg.sigma.has_value();
  return spec;
}

}  // namespace

void save_model(std::ostream& out, const TrainedModel& model) {
  Writer w(out);
  out << kMagic << '\n';
  w.integer("version", TrainedModel::kVersion);
  const TrainConfig& cfg = model.config;
  w.text("spec", format_model_spec(spec_of(cfg)));
  w.real("C", cfg.C);
  w.integer("d", cfg.d);
  w.real("beta", cfg.beta);
  w.real("eta", cfg.eta);
  w.integer("iterations", cfg.iterations);
  if (cfg.sigma) w.real("sigma", *cfg.sigma);
  w.integer("knn_k", cfg.knn_k);
  w.real("eps", cfg.eps);
  w.real("ridge", cfg.ridge);
  w.real("kkt_tol", cfg.dual.kkt_tol);
  w.real("partition_tol", cfg.dual.partition_tol);
  w.integer("max_iterations", static_cast<long long>(cfg.dual.max_iterations));
  for (const auto& c : model.columns) w.text("column", c);
  w.matrix("norm.mean", model.norm.mean);
  w.matrix("norm.std", model.norm.std);

  if (model.npt) {
    const NptState& s = *model.npt;
    w.real("npt.sigma", s.sigma);
    w.real("npt.grand_mean", s.kernel_grand_mean);
    w.matrix("npt.train_data", s.train_data);
    w.matrix("npt.row_means", s.kernel_row_means);
    w.matrix("npt.eigvecs", s.eigvecs);
    w.matrix("npt.eigvals", s.eigvals);
  }

  if (model.ocsvm) {
    const OcsvmModel& oc = *model.ocsvm;
    w.matrix("ocsvm.alpha", oc.alpha);
    w.real("ocsvm.rho", oc.rho);
    w.real("ocsvm.nu", oc.nu);
    if (oc.sigma) w.real("ocsvm.sigma", *oc.sigma);
    w.matrix("ocsvm.train_repr", oc.train_repr);
    w.integer("ocsvm.iterations", static_cast<long long>(oc.iterations));
  } else {
    const ProjectionState& p = model.projection;
    w.matrix("projection.q", p.q);
    w.matrix("projection.s_x", p.s_x);
    w.matrix("projection.s_q", p.s_q);
    w.matrix("projection.whitener", p.whitener);
    const SphereModel& s = model.sphere;
    w.matrix("sphere.alpha", s.dual.alpha);
    w.real("sphere.C", s.dual.C);
    w.real("sphere.objective", s.dual.objective);
    w.integer("sphere.iterations", static_cast<long long>(s.dual.iterations));
    w.indices("sphere.inside", s.dual.inside_idx);
    w.indices("sphere.support", s.dual.support_idx);
    w.indices("sphere.outside", s.dual.outside_idx);
    w.matrix("sphere.train_repr", s.train_repr);
    w.matrix("sphere.center", s.center);
    w.real("sphere.radius", s.radius);
  }
  for (const auto& msg : model.warnings) w.text("warning", msg);
  out << "end\n";
}

TrainedModel load_model(std::istream& in) {
  const Entries e = read_entries(in);
  const long long version = e.integer("version");
  if (version != TrainedModel::kVersion) {
    throw DataError("model file: unsupported version " + std::to_string(version));
  }
  TrainedModel model;
  ModelSpec spec;
  try {
    spec = parse_model_spec(e.scalar("spec"));
  } catch (const UsageError& err) {
    throw DataError(std::string("model file: ") + err.what());
  }
  TrainConfig& cfg = model.config;
  cfg = base_config(spec);
  cfg.C = e.real("C");
  cfg.d = static_cast<int>(e.integer("d"));
  cfg.beta = e.real("beta");
  cfg.eta = e.real("eta");
  cfg.iterations = static_cast<int>(e.integer("iterations"));
  cfg.sigma.reset();
  if (e.has("sigma")) cfg.sigma = e.real("sigma");
  cfg.knn_k = static_cast<int>(e.integer("knn_k"));
  cfg.eps = e.real("eps");
  cfg.ridge = e.real("ridge");
  cfg.dual.kkt_tol = e.real("kkt_tol");
  cfg.dual.partition_tol = e.real("partition_tol");
  cfg.dual.max_iterations = static_cast<std::size_t>(e.integer("max_iterations"));
  model.columns = e.columns;
  model.norm.mean = e.vector("norm.mean");
  model.norm.std = e.vector("norm.std");

  if (e.has("npt.sigma")) {
    NptState s;
    s.sigma = e.real("npt.sigma");
    s.kernel_grand_mean = e.real("npt.grand_mean");
    s.train_data = e.matrix("npt.train_data");
    s.kernel_row_means = e.vector("npt.row_means");
    s.eigvecs = e.matrix("npt.eigvecs");
    s.eigvals = e.vector("npt.eigvals");
    model.npt = std::move(s);
  }

  if (cfg.family == Family::ocsvm) {
    OcsvmModel oc;
    oc.alpha = e.vector("ocsvm.alpha");
    oc.rho = e.real("ocsvm.rho");
    oc.nu = e.real("ocsvm.nu");
    if (e.has("ocsvm.sigma")) oc.sigma = e.real("ocsvm.sigma");
    oc.train_repr = e.matrix("ocsvm.train_repr");
    oc.iterations = static_cast<std::size_t>(e.integer("ocsvm.iterations"));
    model.ocsvm = std::move(oc);
  } else {
    ProjectionState& p = model.projection;
    p.q = e.matrix("projection.q");
    p.s_x = e.matrix("projection.s_x");
    p.s_q = e.matrix("projection.s_q");
    p.whitener = e.matrix("projection.whitener");
    SphereModel& s = model.sphere;
    s.dual.alpha = e.vector("sphere.alpha");
    s.dual.C = e.real("sphere.C");
    s.dual.objective = e.real("sphere.objective");
    s.dual.iterations = static_cast<std::size_t>(e.integer("sphere.iterations"));
    s.dual.inside_idx = e.index_set("sphere.inside");
    s.dual.support_idx = e.index_set("sphere.support");
    s.dual.outside_idx = e.index_set("sphere.outside");
    s.train_repr = e.matrix("sphere.train_repr");
    s.center = e.vector("sphere.center");
    s.radius = e.real("sphere.radius");
  }
  model.warnings = e.warnings;
  return model;
}

std::string serialize_model(const TrainedModel& model) {
  std::ostringstream out;
  save_model(out, model);
  return out.str();
}

void save_model_file(const std::string& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file '" + path + "'");
  save_model(out, model);
  if (!out) throw DataError("failed writing model file '" + path + "'");
}

TrainedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  return load_model(in);
}

}  // namespace occ
