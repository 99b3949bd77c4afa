#include <doctest.h>

#include "egw/estimation.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace egw;
using egw::test::random_graph;
using egw::test::random_spd;
using egw::test::random_spd_on;

namespace {

Matrix ar1_cov(int p, double rho) {
  Matrix s(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) s(i, j) = std::pow(rho, std::abs(i - j));
  return s;
}

}  // namespace

TEST_CASE("complete graph returns the inverse in one step") {
  Philox4x32 rng(1);
  const SampleCov s = make_sample_cov(random_spd(5, rng), 50);
  const auto est = fit_mle(s, Graph::complete(5));
  CHECK(est.converged);
  CHECK(est.iterations == 1);
  CHECK((est.omega_hat - s.sigma_hat.inverse()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("empty graph returns reciprocal diagonal") {
  Philox4x32 rng(2);
  const SampleCov s = make_sample_cov(random_spd(4, rng), 40);
  const auto est = fit_mle(s, Graph(4));
  CHECK(est.converged);
  Matrix expected = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) expected(i, i) = 1.0 / s.sigma_hat(i, i);
  CHECK((est.omega_hat - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("path p=3 against a generic optimizer") {
  // Frozen output of tests/oracles/estimation_oracle.py (BFGS then Nelder-Mead).
  SUBCASE("AR(1) covariance") {
    const auto est = fit_mle(make_sample_cov(ar1_cov(3, 0.7), 100), path_graph(3));
    REQUIRE(est.converged);
    Matrix oracle(3, 3);
    oracle << 1.960784335, -1.3725490376, 0, -1.3725490376, 2.9215686336, -1.3725490157, 0,
        -1.3725490157, 1.9607843154;
    CHECK((est.omega_hat - oracle).cwiseAbs().maxCoeff() < 1e-6);
    const Matrix inv = est.omega_hat.inverse();
    CHECK(inv(0, 1) == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(inv(0, 2) == doctest::Approx(0.49).epsilon(1e-9));
    CHECK(est.omega_hat(0, 2) == 0.0);
  }
  SUBCASE("generic covariance") {
    Matrix s(3, 3);
    s << 1.0, 0.5, 0.3, 0.5, 2.0, 0.4, 0.3, 0.4, 1.5;
    const auto est = fit_mle(make_sample_cov(s, 100), path_graph(3));
    REQUIRE(est.converged);
    Matrix oracle(3, 3);
    oracle << 1.1428571424, -0.2857142942, 0, -0.2857142942, 0.5995975979, -0.1408450663, 0,
        -0.1408450663, 0.7042253595;
    CHECK((est.omega_hat - oracle).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(est.max_violation <= 1e-8);
  }
}

TEST_CASE("singular input is rejected") {
  Matrix s = Matrix::Ones(3, 3);
  const SampleCov scov = make_sample_cov(s, 10);
  CHECK_THROWS_AS(fit_mle(scov, path_graph(3)), Error);
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = 0.0;
  CHECK_THROWS_AS(make_sample_cov(bad, 10), Error);
}

TEST_CASE("max_iter cap flags non-convergence but returns an estimate") {
  Philox4x32 rng(3);
  const SampleCov s = make_sample_cov(random_spd(6, rng), 60);
  for (const auto solver : {MleSolver::ips, MleSolver::newton}) {
    MleConfig cfg;
    cfg.max_iter = 1;
    cfg.tol = 1e-14;
    cfg.solver = solver;
    const auto est = fit_mle(s, cycle_graph(6), cfg);
    CHECK_FALSE(est.converged);
    CHECK(est.iterations == 1);
    CHECK(is_spd(est.omega_hat));
  }
}

TEST_CASE("IPS and Newton agree") {
  Philox4x32 rng(31);
  MleConfig ips;
  ips.solver = MleSolver::ips;
  ips.tol = 1e-11;
  MleConfig newton = ips;
  newton.solver = MleSolver::newton;
  for (int t = 0; t < 40; ++t) {
    const int p = 3 + int(rng() % 10);
    const Graph g = random_graph(p, 0.2 + 0.6 * rng.uniform01(), rng);
    const SampleCov s = make_sample_cov(random_spd(p, rng), 2 * p);
    const auto a = fit_mle(s, g, ips);
    const auto b = fit_mle(s, g, newton);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK((a.omega_hat - b.omega_hat).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + a.omega_hat.cwiseAbs().maxCoeff()));
    CHECK(supported_on(b.omega_hat, g, 0.0));
    CHECK(b.iterations < a.iterations + 20);
  }
}

TEST_CASE("automatic solver switches to IPS above the parameter budget") {
  Philox4x32 rng(32);
  const SampleCov s = make_sample_cov(random_spd(9, rng), 30);
  const Graph g = cycle_graph(9);
  MleConfig small;
  small.newton_max_params = 5;
  MleConfig forced_ips;
  forced_ips.solver = MleSolver::ips;
  const auto a = fit_mle(s, g, small);
  const auto b = fit_mle(s, g, forced_ips);
  CHECK(a.iterations == b.iterations);
  CHECK(a.omega_hat == b.omega_hat);
}

TEST_CASE("log_likelihood examples") {
  const SampleCov eye3 = make_sample_cov(Matrix::Identity(3, 3), 10);
  CHECK(log_likelihood(Matrix::Identity(3, 3), eye3) == doctest::Approx(-42.56815599614018).epsilon(1e-13));
  const SampleCov eye2 = make_sample_cov(Matrix::Identity(2, 2), 4);
  CHECK(log_likelihood(2.0 * Matrix::Identity(2, 2), eye2) ==
        doctest::Approx(-12.5789195433976).epsilon(1e-13));
  const SampleCov empty = make_sample_cov(Matrix::Identity(2, 2), 0);
  CHECK(log_likelihood(2.0 * Matrix::Identity(2, 2), empty) == 0.0);
  const SampleCov one = make_sample_cov(Matrix::Identity(2, 2), 5);
  CHECK_THROWS_AS(log_likelihood(-Matrix::Identity(2, 2), one), Error);
}

TEST_CASE("h_value examples") {
  CHECK(h_value(Matrix::Identity(3, 3), Matrix::Identity(3, 3)) == doctest::Approx(-3.0));
  CHECK(h_value(Matrix(2.0 * Matrix::Identity(2, 2)), Matrix::Identity(2, 2)) ==
        doctest::Approx(2 * std::log(2.0) - 4).epsilon(1e-14));
}

TEST_CASE("MLE maximizes h over P_G and satisfies trace identity") {
  Philox4x32 rng(4);
  const Graph g = random_graph(4, 0.5, rng);
  const SampleCov s = make_sample_cov(random_spd(4, rng), 30);
  const auto est = fit_mle(s, g);
  REQUIRE(est.converged);
  const double h_star = h_value(est.omega_hat, est.omega_hat);
  CHECK(h_star == doctest::Approx(log_det_spd(est.omega_hat) - 4).epsilon(1e-12));
  const Matrix inv = est.omega_hat.inverse();
  const double ll_star = log_likelihood(est.omega_hat, s);
  for (int t = 0; t < 100; ++t) {
    const Matrix w = random_spd_on(g, rng, 0.1 + rng.uniform01());
    CHECK(h_value(w, est.omega_hat) <= h_star + 1e-10);
    CHECK(std::abs(trace_of_product(s.sigma_hat, w) - trace_of_product(inv, w)) <= 1e-8 * w.norm());
    CHECK(log_likelihood(w, s) <= ll_star + 1e-6);
  }
}

TEST_CASE("KKT residual and support on random graphs") {
  Philox4x32 rng(5);
  for (int t = 0; t < 50; ++t) {
    const int p = 3 + int(rng() % 8);
    const Graph g = random_graph(p, 0.4, rng);
    const SampleCov s = make_sample_cov(random_spd(p, rng), 3 * p);
    const auto est = fit_mle(s, g);
    REQUIRE(est.converged);
    CHECK(est.max_violation <= 1e-8);
    CHECK(kkt_violation(est.omega_hat, s, g) <= 1e-8);
    CHECK(supported_on(est.omega_hat, g, 0.0));
    CHECK(is_spd(est.omega_hat));
    CHECK(est.omega_hat.isApprox(est.omega_hat.transpose(), 0.0));
  }
}

TEST_CASE("nesting monotonicity of fitted likelihood") {
  Philox4x32 rng(6);
  const int p = 7;
  const SampleCov s = make_sample_cov(random_spd(p, rng), 40);
  Graph g(p);
  double prev = log_likelihood(fit_mle(s, g).omega_hat, s);
  for (std::size_t k = 0; k < g.max_edges(); ++k) {
    const Edge e = g.pair_at(k);
    g = flip_edge(g, e.i, e.j);
    const double next = log_likelihood(fit_mle(s, g).omega_hat, s);
    CHECK(prev <= next + 1e-6);
    prev = next;
  }
}

TEST_CASE("warm start reaches the cold-start optimum") {
  Philox4x32 rng(7);
  const int p = 8;
  const SampleCov s = make_sample_cov(random_spd(p, rng), 50);
  const Graph g = random_graph(p, 0.4, rng);
  const auto cold = fit_mle(s, g);
  const Edge e = g.pair_at(3);
  const Graph g2 = flip_edge(g, e.i, e.j);
  const auto warm = fit_mle(s, g2, MleConfig{}, cold.omega_hat);
  const auto cold2 = fit_mle(s, g2);
  CHECK((warm.omega_hat - cold2.omega_hat).cwiseAbs().maxCoeff() < 1e-6);
  // A non-PD warm start is replaced by the cold start.
  const auto junk = fit_mle(s, g2, MleConfig{}, Matrix(-Matrix::Identity(p, p)));
  CHECK((junk.omega_hat - cold2.omega_hat).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("sieve keeps spectrum in bounds and preserves support") {
  Philox4x32 rng(8);
  const int p = 6;
  Matrix sig = random_spd(p, rng);
  sig(0, 0) *= 50.0;
  const SampleCov s = make_sample_cov(sig, 60);
  const Graph g = path_graph(p);
  MleConfig cfg;
  cfg.sieve_xi = 3.0;
  const auto est = fit_mle(s, g, cfg);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Matrix>(est.omega_hat).eigenvalues();
  CHECK(ev.minCoeff() >= 1.0 / 3.0 - 1e-10);
  CHECK(ev.maxCoeff() <= 3.0 + 1e-10);
  CHECK(supported_on(est.omega_hat, g));
  CHECK(est.max_violation == doctest::Approx(kkt_violation(est.omega_hat, s, g)));
}

TEST_CASE("sample covariance from data") {
  Matrix x(4, 2);
  x << 1, 2, 3, 4, 5, 7, 7, 7;
  const auto s = sample_cov_from_data(x, DataOptions{.center = false});
  CHECK(s.n == 4);
  CHECK(s.sigma_hat.isApprox(x.transpose() * x / 4.0));
  const auto c = sample_cov_from_data(x);
  const Matrix xc = x.rowwise() - x.colwise().mean();
  CHECK(c.sigma_hat.isApprox(xc.transpose() * xc / 4.0));
  Matrix constant = x;
  constant.col(1).setConstant(3.0);
  CHECK_THROWS_AS(sample_cov_from_data(constant), Error);
}
