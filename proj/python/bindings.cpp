#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "occ/errors.hpp"
#include "occ/evaluation.hpp"
#include "occ/graphs.hpp"
#include "occ/kernelization.hpp"
#include "occ/model_io.hpp"
#include "occ/model_spec.hpp"
#include "occ/subspace.hpp"
#include "occ/svdd.hpp"

namespace py = pybind11;
using namespace occ;

namespace {

TransactionTable targets_table(const Eigen::MatrixXd& x, const std::vector<std::string>& columns) {
  TransactionTable t;
  t.features = x;
  t.labels.assign(static_cast<std::size_t>(x.rows()), kTarget);
  t.columns = columns;
  if (t.columns.empty()) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) t.columns.push_back("f" + std::to_string(c + 1));
  }
  return t;
}

TrainedModel fit(const std::string& spec, const Eigen::MatrixXd& x, double c, int d, double beta, double eta,
                 int iterations, std::optional<double> sigma, int knn_k, const std::vector<std::string>& columns) {
  TrainConfig cfg = base_config(parse_model_spec(spec));
  cfg.C = c;
  cfg.d = d;
  cfg.beta = beta;
  cfg.eta = eta;
  cfg.iterations = iterations;
  cfg.knn_k = knn_k;
  if (cfg.sigma) cfg.sigma = sigma.value_or(1.0);
  return train(cfg, targets_table(x, columns));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "One-class subspace SVDD models";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<DualSolution>(m, "DualSolution")
      .def_readonly("alpha", &DualSolution::alpha)
      .def_readonly("C", &DualSolution::C)
      .def_readonly("inside", &DualSolution::inside_idx)
      .def_readonly("support", &DualSolution::support_idx)
      .def_readonly("outside", &DualSolution::outside_idx)
      .def_readonly("objective", &DualSolution::objective)
      .def_readonly("iterations", &DualSolution::iterations);

  py::class_<TrainedModel>(m, "Model")
      .def_property_readonly("spec", [](const TrainedModel& t) {
        ModelSpec s;
        s.family = t.config.family;
        s.graph = t.config.graph;
        s.solver = t.config.solver;
        s.direction = t.config.direction;
        s.psi = t.config.psi;
        s.kernel = t.config.sigma.has_value();
        return format_model_spec(s);
      })
      .def_property_readonly("hyperparameters", [](const TrainedModel& t) { return describe_hyperparameters(t.config); })
      .def_property_readonly("projection", [](const TrainedModel& t) { return t.projection.q; })
      .def_property_readonly("whitener", [](const TrainedModel& t) { return t.projection.whitener; })
      .def_property_readonly("alpha", [](const TrainedModel& t) {
        return t.ocsvm ? t.ocsvm->alpha : t.sphere.dual.alpha;
      })
      .def_property_readonly("radius", [](const TrainedModel& t) { return t.sphere.radius; })
      .def_property_readonly("center", [](const TrainedModel& t) { return t.sphere.center; })
      .def_readonly("warnings", &TrainedModel::warnings)
      .def("transform", [](const TrainedModel& t, const Eigen::MatrixXd& x) { return transform(t, x); },
           py::arg("x"))
      .def("score", [](const TrainedModel& t, const Eigen::MatrixXd& x) { return predict(t, x).scores; },
           py::arg("x"), "Positive scores mark outliers.")
      .def("predict", [](const TrainedModel& t, const Eigen::MatrixXd& x) { return predict(t, x).labels; },
           py::arg("x"), "1 = outlier (fraud), 0 = target.")
      .def("to_string", &serialize_model)
      .def("save", [](const TrainedModel& t, const std::string& path) { save_model_file(path, t); }, py::arg("path"));

  m.def("train", &fit, py::arg("spec"), py::arg("x"), py::arg("C") = 0.1, py::arg("d") = 2, py::arg("beta") = 1.0,
        py::arg("eta") = 1.0, py::arg("iterations") = 5, py::arg("sigma") = py::none(),
        py::arg("knn_k") = kDefaultNeighbors, py::arg("columns") = std::vector<std::string>{},
        "Fit a model on target rows `x` (N x D). `spec` uses the model spec grammar, e.g. 'gessvdd-knn-g-min'.");
  m.def("load_model", &load_model_file, py::arg("path"));
  m.def("model_from_string", [](const std::string& s) {
    std::istringstream in(s);
    return load_model(in);
  });

  m.def("solve_dual", [](const Eigen::MatrixXd& k, double c) { return solve_dual(k, c); }, py::arg("K"), py::arg("C"));
  m.def("linear_gram", &linear_gram, py::arg("P"));
  m.def("rbf_kernel", &rbf_kernel, py::arg("x"), py::arg("y"), py::arg("sigma"));
  m.def("knn_laplacian", [](const Eigen::MatrixXd& x, int k) { return knn_laplacian(knn_adjacency(x, k)).values; },
        py::arg("x"), py::arg("k") = kDefaultNeighbors);
  m.def("pca_laplacian", [](Eigen::Index n) { return pca_laplacian(n).values; }, py::arg("n"));

  m.def("metrics", [](const std::vector<int>& truth, const std::vector<int>& predicted) {
    const Metrics r = metrics(confusion(truth, predicted));
    py::dict d;
    d["precision"] = r.precision;
    d["recall"] = r.recall;
    d["f1"] = r.f1;
    d["specificity"] = r.specificity;
    d["gmean"] = r.gmean;
    return d;
  }, py::arg("truth"), py::arg("predicted"), "Metrics with the normal class (label 0) as positive.");

  m.def("parse_model_spec", [](const std::string& s) { return format_model_spec(parse_model_spec(s)); }, py::arg("spec"),
        "Canonical form of a model spec string.");
  m.def("display_name", [](const std::string& s) { return display_name(parse_model_spec(s)); }, py::arg("spec"));
  m.def("all_variants", [] {
    std::vector<std::string> out;
    for (const auto& s : expand_all_variants()) out.push_back(format_model_spec(s));
    return out;
  });
}
