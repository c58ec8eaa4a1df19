#include <doctest.h>

#include <cmath>

#include "occ/errors.hpp"
#include "occ/linalg.hpp"
#include "occ/subspace.hpp"
#include "test_util.hpp"

using namespace occ;
using occ::testing::make_table;
using occ::testing::random_matrix;
using occ::testing::random_psd;

namespace {

Eigen::MatrixXd random_orthonormal_rows(Rng& rng, int d, int dims) {
  return orthonormalize_rows(random_matrix(rng, d, dims));
}

// Central differences of f at every entry of q.
template <class F>
Eigen::MatrixXd numeric_gradient(F f, const Eigen::MatrixXd& q, double h = 1e-5) {
  Eigen::MatrixXd g(q.rows(), q.cols());
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
      Eigen::MatrixXd plus = q, minus = q;
      plus(r, c) += h;
      minus(r, c) -= h;
      g(r, c) = (f(plus) - f(minus)) / (2 * h);
    }
  }
  return g;
}

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(1e-12, b.norm());
}

Eigen::VectorXd random_simplex(Rng& rng, int n) {
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a(i) = rng.uniform() + 0.05;
  return a / a.sum();
}

TransactionTable gaussian_targets(Rng& rng, int n, int dims) {
  Eigen::MatrixXd x = random_matrix(rng, n, dims);
  for (int c = 0; c < dims; ++c) x.col(c) *= 1.0 + c;
  return make_table(x, std::vector<int>(static_cast<std::size_t>(n), 0));
}

}  // namespace

TEST_CASE("init_projection follows the dominant axis") {
  Rng rng(1);
  Eigen::MatrixXd x = random_matrix(rng, 50, 3);
  x.col(0) *= 20.0;
  const Eigen::MatrixXd q = init_projection(x, 1);
  CHECK(q(0, 0) > 0.99);
  CHECK(q.cols() == 3);

  const Eigen::MatrixXd full = init_projection(x, 3);
  CHECK((full * full.transpose() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(init_projection(x, 2) == init_projection(x, 2));
  CHECK_THROWS_AS(init_projection(x, 4), UsageError);
  CHECK_THROWS_AS(init_projection(x.topRows(2), 3), UsageError);
}

TEST_CASE("scatter from graph") {
  Rng rng(2);
  const Eigen::MatrixXd x = random_matrix(rng, 6, 3);
  CHECK((scatter_from_graph(x, identity_laplacian(6).values) - x.transpose() * x).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd two(2, 1);
  two << 1, -1;
  CHECK(scatter_from_graph(two, pca_laplacian(2).values)(0, 0) == doctest::Approx(1.0));

  Eigen::MatrixXd same(5, 2);
  same.rowwise() = Eigen::RowVector2d(3.0, -1.0);
  Eigen::MatrixXd jittered = same;
  jittered(1, 0) += 1e-3;  // keeps the knn graph well defined
  const auto l = build_laplacian(GraphKind::knn, jittered, 2).values;
  CHECK(scatter_from_graph(same, l).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(scatter_from_graph(x, identity_laplacian(5).values), DataError);
}

TEST_CASE("whitener") {
  Eigen::MatrixXd s = Eigen::Vector2d(4, 1).asDiagonal();
  Eigen::MatrixXd expected = Eigen::Vector2d(0.5, 1).asDiagonal();
  CHECK((whitener(s) - expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((whitener(Eigen::MatrixXd::Zero(3, 3)) - 1000.0 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);

  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd p = random_psd(rng, 4);
    const Eigen::MatrixXd w = whitener(p);
    CHECK((w * p * w.transpose() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-6);
  }
  // Rank-deficient: identity on the retained eigenspace only.
  const Eigen::MatrixXd a = random_matrix(rng, 4, 2);
  const Eigen::MatrixXd low = a * a.transpose();
  const SymEigen eig = sym_eigen_descending(low);
  const Eigen::MatrixXd keep = eig.vectors.leftCols(2);
  const Eigen::MatrixXd w = whitener(low);
  CHECK((keep.transpose() * w * low * w * keep - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("alpha scatter equals the explicit alpha laplacian form") {
  Rng rng(4);
  const Eigen::MatrixXd x = random_matrix(rng, 9, 3);
  const Eigen::VectorXd a = random_simplex(rng, 9);
  const Eigen::MatrixXd explicit_m = x.transpose() * alpha_laplacian(a) * x;
  CHECK((alpha_scatter(x, a) - explicit_m).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(alpha_scatter(x, Eigen::VectorXd::Ones(3)), DataError);
}

TEST_CASE("graph-embedded criterion") {
  SUBCASE("single point carries no spread") {
    Eigen::MatrixXd x(1, 2);
    x << 1.0, 2.0;
    const Eigen::MatrixXd m = alpha_scatter(x, Eigen::VectorXd::Ones(1));
    CHECK(gessvdd_criterion(Eigen::MatrixXd::Identity(1, 2), m, Eigen::MatrixXd::Identity(2, 2)) ==
          doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("uniform alpha matches naive summation in whitened coordinates") {
    Rng rng(5);
    const Eigen::MatrixXd x = random_matrix(rng, 12, 4);
    const Eigen::MatrixXd q = random_matrix(rng, 2, 4);
    const Eigen::MatrixXd s_x = scatter_from_graph(x, identity_laplacian(12).values);
    const Eigen::VectorXd a = Eigen::VectorXd::Constant(12, 1.0 / 12);
    const double j = gessvdd_criterion(q, alpha_scatter(x, a), s_x);

    const Eigen::MatrixXd w = whitener(q * s_x * q.transpose());
    double sum_sq = 0;
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
    for (int i = 0; i < 12; ++i) {
      const Eigen::VectorXd p = w * q * x.row(i).transpose();
      sum_sq += a(i) * p.squaredNorm();
      mean += a(i) * p;
    }
    CHECK(j == doctest::Approx(sum_sq - mean.squaredNorm()).epsilon(1e-10));
  }
  SUBCASE("invariant to rotations of Q") {
    Rng rng(6);
    for (int t = 0; t < 5; ++t) {
      const Eigen::MatrixXd x = random_matrix(rng, 15, 5);
      const Eigen::MatrixXd s_x = scatter_from_graph(x, build_laplacian(GraphKind::knn, x, 3).values);
      const Eigen::MatrixXd m = alpha_scatter(x, random_simplex(rng, 15));
      const Eigen::MatrixXd q = random_matrix(rng, 3, 5);
      const Eigen::MatrixXd u = random_orthonormal_rows(rng, 3, 3);
      CHECK(gessvdd_criterion(u * q, m, s_x) == doctest::Approx(gessvdd_criterion(q, m, s_x)).epsilon(1e-8));
    }
  }
}

TEST_CASE("graph-embedded gradient agrees with central differences") {
  Rng rng(7);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd x = random_matrix(rng, 12, 5);
    const GraphKind kind = t % 3 == 0 ? GraphKind::identity : (t % 3 == 1 ? GraphKind::pca : GraphKind::knn);
    const Eigen::MatrixXd s_x = scatter_from_graph(x, build_laplacian(kind, x, 3).values);
    const Eigen::MatrixXd m = alpha_scatter(x, random_simplex(rng, 12));
    const Eigen::MatrixXd q = random_matrix(rng, 2, 5);
    const auto f = [&](const Eigen::MatrixXd& qq) { return gessvdd_criterion(qq, m, s_x); };
    CHECK(rel_err(gessvdd_gradient(q, m, s_x), numeric_gradient(f, q)) <= 1e-4);
  }
}

TEST_CASE("subspace gradient with the Psi term agrees with central differences") {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd x = random_matrix(rng, 12, 5);
    const Eigen::VectorXd a = random_simplex(rng, 12);
    const Eigen::MatrixXd m = alpha_scatter(x, a);
    const auto psi = psi_regularizer(static_cast<Psi>(t % 4), x, a, 0.3);
    const double beta = 0.01 * std::pow(10.0, t % 5);
    const Eigen::MatrixXd q = random_matrix(rng, 2, 5);
    const auto f = [&](const Eigen::MatrixXd& qq) { return ssvdd_criterion(qq, m, psi.factor, beta); };
    CHECK(rel_err(ssvdd_gradient(q, m, psi.factor, beta), numeric_gradient(f, q)) <= 1e-4);
  }
}

TEST_CASE("gradient vanishes at degenerate or stationary points") {
  Rng rng(9);
  const Eigen::MatrixXd x = random_matrix(rng, 10, 4);
  const Eigen::MatrixXd s_x = scatter_from_graph(x, pca_laplacian(10).values);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(10);
  e1(0) = 1.0;
  const Eigen::MatrixXd zero_m = alpha_scatter(x, e1);
  CHECK(gessvdd_gradient(random_matrix(rng, 2, 4), zero_m, s_x).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::MatrixXd m = alpha_scatter(x, random_simplex(rng, 10));
  const auto sel = spectral_update(m, s_x, 2, Direction::max, 1e-14);
  const Eigen::MatrixXd q = sel.vectors.transpose();
  const Eigen::MatrixXd g = gessvdd_gradient(q, m, s_x, 1e-14);
  CHECK(g.norm() <= 1e-6 * std::max(1.0, m.norm()));
}

TEST_CASE("gradient steps move the criterion in the requested direction") {
  Rng rng(10);
  const Eigen::MatrixXd x = random_matrix(rng, 20, 4);
  const Eigen::MatrixXd s_x = scatter_from_graph(x, build_laplacian(GraphKind::knn, x, 4).values);
  const Eigen::MatrixXd m = alpha_scatter(x, random_simplex(rng, 20));
  const Eigen::MatrixXd q = random_matrix(rng, 2, 4);
  const Eigen::MatrixXd g = gessvdd_gradient(q, m, s_x);
  const double eta = 1e-4 / std::max(1.0, g.norm());
  const double j0 = gessvdd_criterion(q, m, s_x);
  CHECK(gessvdd_criterion(gradient_update(q, g, eta, Direction::min, false), m, s_x) <= j0);
  CHECK(gessvdd_criterion(gradient_update(q, g, eta, Direction::max, false), m, s_x) >= j0);

  const Eigen::MatrixXd orth = random_orthonormal_rows(rng, 2, 4);
  CHECK((gradient_update(orth, g, 0.0, Direction::min, true) - orth).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::MatrixXd stepped = gradient_update(orth, g, 0.5, Direction::max, true);
  CHECK((stepped * stepped.transpose() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);

  Eigen::MatrixXd bad = g;
  bad(0, 0) = std::nan("");
  CHECK_THROWS_WITH_AS(gradient_update(q, bad, 1.0, Direction::min, false, 3),
                       doctest::Contains("iteration 3"), NumericalError);
}

TEST_CASE("spectral update on diagonal problems") {
  const Eigen::MatrixXd m = Eigen::Vector3d(3, 1, 0.5).asDiagonal();
  const Eigen::MatrixXd i3 = Eigen::MatrixXd::Identity(3, 3);
  const auto mx = spectral_update(m, i3, 2, Direction::max);
  CHECK(std::abs(mx.vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(mx.vectors(1, 1)) == doctest::Approx(1.0));
  CHECK(mx.padded == 0);
  const auto mn = spectral_update(m, i3, 2, Direction::min);
  CHECK(std::abs(mn.vectors(2, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(mn.vectors(1, 1)) == doctest::Approx(1.0));
  CHECK(mn.values(0) < mn.values(1));

  const Eigen::MatrixXd one_positive = Eigen::Vector3d(2, 0, -1).asDiagonal();
  const auto padded = spectral_update(one_positive, i3, 2, Direction::max);
  CHECK(padded.padded == 1);
  CHECK(std::abs(padded.vectors(1, 1)) == doctest::Approx(1.0));  // |0| < |-1|
  CHECK_THROWS_AS(spectral_update(m, i3, 4, Direction::max), UsageError);
}

TEST_CASE("spectral max beats random directions on the Rayleigh quotient") {
  Rng rng(11);
  const Eigen::MatrixXd x = random_matrix(rng, 25, 4);
  const Eigen::MatrixXd s_x = scatter_from_graph(x, build_laplacian(GraphKind::knn, x, 5).values);
  const Eigen::MatrixXd m = alpha_scatter(x, random_simplex(rng, 25));
  const Eigen::VectorXd v = spectral_update(m, s_x, 1, Direction::max).vectors.col(0);
  const auto rq = [&](const Eigen::VectorXd& q) { return q.dot(m * q) / q.dot(s_x * q); };
  const double best = rq(v);
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd r = random_matrix(rng, 4, 1);
    r.normalize();
    CHECK(rq(r) <= best * (1 + 1e-6));
  }

  const Eigen::MatrixXd q2 = spectral_update(m, s_x, 2, Direction::max).vectors.transpose();
  const double j2 = gessvdd_criterion(q2, m, s_x);
  for (int t = 0; t < 100; ++t) {
    CHECK(gessvdd_criterion(random_orthonormal_rows(rng, 2, 4), m, s_x) <= j2 * (1 + 1e-6));
  }
}

TEST_CASE("spectral regression") {
  Rng rng(12);
  SUBCASE("square invertible data interpolates the targets") {
    const Eigen::MatrixXd x = random_matrix(rng, 5, 5);
    const Eigen::VectorXd a = random_simplex(rng, 5);
    const Eigen::MatrixXd lx = pca_laplacian(5).values;
    const auto sel = spectral_regression_update(alpha_laplacian(a), lx, x, 2, Direction::max, 1e-12);
    const auto targets = select_generalized_eigen(alpha_laplacian(a), lx, 2, Direction::max);
    for (int c = 0; c < 2; ++c) {
      Eigen::VectorXd fit = x * sel.vectors.col(c);
      Eigen::VectorXd t = targets.vectors.col(c);
      // Sign normalization happens on q, so compare up to sign.
      if (fit.dot(t) < 0) fit = -fit;
      CHECK((fit - t).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
  SUBCASE("large ridge aligns with the data-weighted targets") {
    const Eigen::MatrixXd x = random_matrix(rng, 8, 3);
    const Eigen::VectorXd a = random_simplex(rng, 8);
    const Eigen::MatrixXd lx = build_laplacian(GraphKind::knn, x, 3).values;
    const double ridge = 1e8;
    const auto sel = spectral_regression_update(alpha_laplacian(a), lx, x, 1, Direction::max, ridge);
    const auto targets = select_generalized_eigen(alpha_laplacian(a), lx, 1, Direction::max);
    Eigen::VectorXd asym = x.transpose() * targets.vectors.col(0) / ridge;
    Eigen::VectorXd q = sel.vectors.col(0);
    if (q.dot(asym) < 0) q = -q;
    CHECK((q - asym).norm() <= 1e-6 * asym.norm());
  }
  SUBCASE("sample-space eigenvalues match a dense oracle") {
    const Eigen::MatrixXd x = random_matrix(rng, 8, 3);
    const Eigen::VectorXd a = random_simplex(rng, 8);
    const Eigen::MatrixXd la = alpha_laplacian(a);
    const Eigen::MatrixXd lx = build_laplacian(GraphKind::knn, x, 3).values;
    const auto sel = select_generalized_eigen(la, lx, 3, Direction::max);

    // B^{-1/2} A B^{-1/2} via an explicit symmetric square root.
    Eigen::MatrixXd b = lx + 1e-6 * Eigen::MatrixXd::Identity(8, 8);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> be(b);
    const Eigen::MatrixXd b_isqrt =
        be.eigenvectors() * be.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * be.eigenvectors().transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oe(b_isqrt * la * b_isqrt);
    const Eigen::VectorXd ev = oe.eigenvalues();  // ascending
    for (int c = 0; c < 3; ++c) {
      CHECK(sel.values(c) == doctest::Approx(ev(7 - c)).epsilon(1e-8));
      const Eigen::VectorXd v = sel.vectors.col(c);
      CHECK((la * v - sel.values(c) * (b * v)).norm() <= 1e-8 * std::max(1.0, v.norm()));
    }
  }
}

TEST_CASE("psi regularizer variants") {
  Rng rng(13);
  const Eigen::MatrixXd x = random_matrix(rng, 3, 2);
  Eigen::VectorXd a(3);
  a << 0.0, 0.3, 0.5;  // not on the simplex; only the masks matter here
  const auto p0 = psi_regularizer(Psi::psi0, x, a, 0.5);
  CHECK(p0.lambda.isZero());
  CHECK(p0.factor.isZero());
  const auto p1 = psi_regularizer(Psi::psi1, x, a, 0.5);
  CHECK(p1.lambda == Eigen::VectorXd::Ones(3));
  const Eigen::VectorXd s = x.transpose() * Eigen::VectorXd::Ones(3);
  CHECK((p1.factor - s * s.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  const auto p2 = psi_regularizer(Psi::psi2, x, a, 0.5);
  CHECK(p2.lambda == Eigen::Vector3d(0, 0.3, 0));
  const auto part = partition_alphas(a, 0.5, 1e-6);
  for (std::size_t i : part.support) CHECK(p2.lambda(static_cast<Eigen::Index>(i)) == a(static_cast<Eigen::Index>(i)));
  const auto p3 = psi_regularizer(Psi::psi3, x, a, 0.5);
  CHECK(p3.lambda == Eigen::Vector3d(0, 0.3, 0.5));
}

TEST_CASE("training with zero iterations is SVDD on the initial projection") {
  Rng rng(14);
  const auto table = gaussian_targets(rng, 40, 4);
  const NormStats stats = fit_norm_stats(table);
  const Eigen::MatrixXd x = normalize(table.features, stats);

  TrainConfig cfg;
  cfg.family = Family::ssvdd;
  cfg.d = 2;
  cfg.C = 0.1;
  cfg.iterations = 0;
  const auto model = train(cfg, table);
  const Eigen::MatrixXd p = x * init_projection(x, 2).transpose();
  const auto direct = solve_dual(linear_gram(p), 0.1);
  CHECK((model.sphere.dual.alpha - direct.alpha).cwiseAbs().maxCoeff() < 1e-8);

  for (GraphKind g : {GraphKind::identity, GraphKind::pca, GraphKind::knn}) {
    TrainConfig ge = cfg;
    ge.family = Family::gessvdd;
    ge.graph = g;
    const auto gm = train(ge, table);
    const Eigen::MatrixXd q = init_projection(x, 2);
    const Eigen::MatrixXd s_x = scatter_from_graph(x, build_laplacian(g, x, 5).values);
    const Eigen::MatrixXd w = whitener(q * s_x * q.transpose());
    const auto gd = solve_dual(linear_gram(x * q.transpose() * w.transpose()), 0.1);
    CHECK((gm.sphere.dual.alpha - gd.alpha).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("trained projection state invariants") {
  Rng rng(15);
  const auto table = gaussian_targets(rng, 60, 5);
  for (Solver solver : {Solver::gradient, Solver::spectral, Solver::spectral_regression}) {
    for (Direction dir : {Direction::min, Direction::max}) {
      TrainConfig cfg;
      cfg.graph = GraphKind::knn;
      cfg.solver = solver;
      cfg.direction = dir;
      cfg.d = 2;
      cfg.C = 0.1;
      cfg.eta = 0.1;
      const auto model = train(cfg, table);
      const auto& proj = model.projection;
      CHECK((proj.s_q - proj.q * proj.s_x * proj.q.transpose()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((proj.whitener * proj.s_q * proj.whitener.transpose() - Eigen::MatrixXd::Identity(2, 2))
                .cwiseAbs().maxCoeff() < 1e-6);
      CHECK(std::abs(model.sphere.dual.alpha.sum() - 1.0) < 1e-8);
      CHECK(model.sphere.radius > 0.0);
    }
  }
  TrainConfig ss;
  ss.family = Family::ssvdd;
  ss.psi = Psi::psi2;
  ss.beta = 0.1;
  ss.eta = 0.5;
  ss.d = 3;
  const auto model = train(ss, table);
  const Eigen::MatrixXd& q = model.projection.q;
  CHECK((q * q.transpose() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(model.projection.whitener == Eigen::MatrixXd::Identity(3, 3));
}

TEST_CASE("prediction on training targets and far points") {
  Rng rng(16);
  const auto table = gaussian_targets(rng, 50, 3);
  for (bool kernel : {false, true}) {
    TrainConfig cfg;
    cfg.graph = GraphKind::pca;
    cfg.solver = Solver::spectral;
    cfg.d = 2;
    cfg.C = 0.1;
    if (kernel) cfg.sigma = 2.0;
    const auto model = train(cfg, table);
    const auto pred = predict(model, table);
    CHECK((transform(model, table.features) - model.sphere.train_repr).cwiseAbs().maxCoeff() < 1e-6);

    int positive = 0;
    for (Eigen::Index i = 0; i < pred.scores.size(); ++i) positive += pred.scores(i) > 1e-6;
    CHECK(positive <= static_cast<int>(std::floor(1.0 / cfg.C + 1e-9)));
    for (std::size_t s : model.sphere.dual.support_idx) {
      CHECK(std::abs(pred.scores(static_cast<Eigen::Index>(s))) <= 1e-5);
    }
    for (Eigen::Index i = 0; i < pred.scores.size(); ++i) {
      CHECK(pred.labels[static_cast<std::size_t>(i)] == (pred.scores(i) > 0 ? 1 : 0));
    }
    if (!kernel) {
      // The RBF map is bounded, so only the linear pipeline is unbounded far away.
      const Eigen::MatrixXd far = Eigen::MatrixXd::Constant(1, 3, 1e6);
      CHECK(predict(model, far).labels[0] == kOutlier);
    }
    CHECK_THROWS_AS(predict(model, Eigen::MatrixXd::Zero(1, 4)), DataError);
  }
}

TEST_CASE("training is deterministic") {
  Rng rng(17);
  const auto table = gaussian_targets(rng, 40, 4);
  TrainConfig cfg;
  cfg.family = Family::ssvdd;
  cfg.psi = Psi::psi1;
  cfg.beta = 0.01;
  cfg.eta = 0.1;
  cfg.sigma = 1.0;
  const auto a = train(cfg, table);
  const auto b = train(cfg, table);
  CHECK(a.projection.q == b.projection.q);
  CHECK(a.sphere.dual.alpha == b.sphere.dual.alpha);
  CHECK(a.sphere.radius == b.sphere.radius);
}

TEST_CASE("training input validation") {
  Rng rng(18);
  auto table = gaussian_targets(rng, 20, 3);
  TrainConfig cfg;
  table.labels[3] = kOutlier;
  CHECK_THROWS_WITH_AS(train(cfg, table), doctest::Contains("target rows only"), DataError);
  table.labels[3] = kTarget;

  TrainConfig bad = cfg;
  bad.family = Family::ssvdd;
  bad.solver = Solver::spectral;
  CHECK_THROWS_AS(train(bad, table), UsageError);
  bad = cfg;
  bad.d = 4;
  CHECK_THROWS_AS(train(bad, table), UsageError);
  bad = cfg;
  bad.C = 0.01;  // N*C < 1
  CHECK_THROWS_AS(train(bad, table), DataError);
  bad = cfg;
  bad.sigma = -1.0;
  CHECK_THROWS_AS(train(bad, table), UsageError);
}

TEST_CASE("plain and ellipsoidal families") {
  Rng rng(19);
  const auto table = gaussian_targets(rng, 30, 3);
  TrainConfig cfg;
  cfg.family = Family::svdd;
  cfg.C = 0.2;
  const auto model = train(cfg, table);
  const Eigen::MatrixXd x = normalize(table.features, model.norm);
  CHECK((model.sphere.dual.alpha - solve_dual(linear_gram(x), 0.2).alpha).cwiseAbs().maxCoeff() < 1e-12);

  cfg.family = Family::esvdd;
  const auto e = train(cfg, table);
  CHECK(e.projection.whitener.rows() == 3);
  const Eigen::MatrixXd rep = transform(e, table.features);
  const Eigen::MatrixXd centered = rep.rowwise() - rep.colwise().mean();
  CHECK((centered.transpose() * centered / 30.0 - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
}
