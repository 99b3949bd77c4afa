#include <doctest.h>

#include "egw/posterior.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace egw;
using egw::test::random_graph;
using egw::test::random_spd;
using egw::test::random_spd_on;

namespace {

double exact_log_marginal(const Graph& g, const SampleCov& s, const PosteriorConfig& cfg) {
  // prior + α log L(Ω̂) − (αn/2) h(Ω̂) + log I_post − log I_prior, exact for decomposable g.
  const auto est = fit_mle(s, g, cfg.mle);
  const double an = cfg.alpha * double(s.n);
  const double h_hat = log_det_spd(est.omega_hat) - double(g.p());
  return log_graph_prior(g, cfg.prior) + cfg.alpha * log_likelihood(est.omega_hat, s) - 0.5 * an * h_hat +
         analytic_log_norm(conditional_posterior_params(est, g, s, cfg)).log_value -
         analytic_log_norm(empirical_prior_params(est, g, cfg.delta)).log_value;
}

}  // namespace

TEST_CASE("graph prior examples") {
  CHECK(log_graph_prior(Graph(3), GraphPrior::bernoulli(0.45)) == doctest::Approx(3 * std::log(0.55)));
  CHECK(log_graph_prior(Graph(3), GraphPrior::bernoulli(0.45)) == doctest::Approx(-1.7935110022668613).epsilon(1e-13));
  const auto uniform = GraphPrior::bernoulli(0.5);
  Philox4x32 rng(31);
  const double base = log_graph_prior(Graph(6), uniform);
  for (int t = 0; t < 20; ++t) CHECK(log_graph_prior(random_graph(6, 0.5, rng), uniform) == doctest::Approx(base));
  const Graph four(10, std::vector<Edge>{{0, 1}, {2, 3}, {4, 5}, {6, 7}});
  CHECK(log_graph_prior(four, GraphPrior::exponential(2.0)) == doctest::Approx(-8 * std::log(10.0)));
}

TEST_CASE("truncated prior short-circuits scoring") {
  PosteriorConfig cfg;
  cfg.prior = GraphPrior::bernoulli(0.45, 1);
  const SampleCov s = make_sample_cov(Matrix::Identity(3, 3), 50);
  CHECK(std::isinf(log_graph_prior(Graph::complete(3), cfg.prior)));
  const auto sc = score_graph(Graph::complete(3), s, cfg);
  CHECK(sc.log_score == -INFINITY);
  CHECK(sc.estimate.omega_hat.size() == 0);
}

TEST_CASE("config validation") {
  const SampleCov s = make_sample_cov(Matrix::Identity(2, 2), 10);
  PosteriorConfig cfg;
  cfg.delta = 2.0;
  CHECK_THROWS_AS(score_graph(Graph(2), s, cfg), Error);
  cfg = {};
  cfg.alpha = 1.0;
  CHECK_THROWS_AS(score_graph(Graph(2), s, cfg), Error);
  cfg = {};
  cfg.prior.q = 0.0;
  CHECK_THROWS_AS(score_graph(Graph(2), s, cfg), Error);
}

TEST_CASE("two-graph score difference at Σ̂ = I") {
  const SampleCov s = make_sample_cov(Matrix::Identity(2, 2), 100);
  const PosteriorConfig cfg;  // δ = 4, α = 0.99, q = 0.45
  const auto empty = score_graph(Graph(2), s, cfg);
  const auto full = score_graph(Graph::complete(2), s, cfg);
  CHECK(empty.log_lik_alpha == doctest::Approx(full.log_lik_alpha).epsilon(1e-14));
  const double expected = std::log(11.0 / 9.0) - 0.5 * std::log(2.0 / 101.0);
  CHECK(empty.log_score - full.log_score == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(2.161658).epsilon(1e-6));

  // Normalization over the two-graph model space.
  const double m = std::max(empty.log_score, full.log_score);
  const double pe = std::exp(empty.log_score - m), pf = std::exp(full.log_score - m);
  CHECK(pe / (pe + pf) + pf / (pe + pf) == doctest::Approx(1.0));
}

TEST_CASE("score decomposition and determinism") {
  Philox4x32 rng(32);
  const SampleCov s = make_sample_cov(random_spd(6, rng), 80);
  const PosteriorConfig cfg;
  const Graph g = random_graph(6, 0.4, rng);
  const auto a = score_graph(g, s, cfg);
  const auto b = score_graph(g, s, cfg);
  CHECK(a.log_score == b.log_score);
  CHECK(a.log_score == a.log_prior + a.log_lik_alpha + a.dim_penalty);
}

TEST_CASE("conditional posterior parameters") {
  const SampleCov s1 = make_sample_cov(Matrix::Identity(1, 1), 100);
  const PosteriorConfig cfg;
  const auto est = fit_mle(s1, Graph(1));
  const auto post = conditional_posterior_params(est, Graph(1), s1, cfg);
  CHECK(post.delta == doctest::Approx(103.0));
  CHECK(post.scale_d(0, 0) == doctest::Approx(101.0));
  CHECK((post.delta - 2) / post.scale_d(0, 0) == doctest::Approx(1.0));

  const SampleCov s0 = make_sample_cov(Matrix::Identity(1, 1), 0);
  const auto none = conditional_posterior_params(est, Graph(1), s0, cfg);
  const auto prior = empirical_prior_params(est, Graph(1), cfg.delta);
  CHECK(none.delta == prior.delta);
  CHECK(none.scale_d.isApprox(prior.scale_d));
}

TEST_CASE("posterior mode equals the MLE on a path") {
  Matrix sig(3, 3);
  sig << 1.0, 0.5, 0.3, 0.5, 2.0, 0.4, 0.3, 0.4, 1.5;
  const SampleCov s = make_sample_cov(sig, 100);
  const PosteriorConfig cfg;
  const Graph g = path_graph(3);
  const auto est = fit_mle(s, g);
  const auto post = conditional_posterior_params(est, g, s, cfg);
  // The mode maximizes (b/2) log|Ω| − ½ tr(Σ̃Ω), i.e. the MLE for Σ̃/b.
  const double b = post.delta - 2.0;
  const auto mode = fit_mle(make_sample_cov(post.scale_d / b, 1), g);
  Matrix oracle(3, 3);  // tests/oracles/estimation_oracle.py, generic case
  oracle << 1.1428571424, -0.2857142942, 0, -0.2857142942, 0.5995975979, -0.1408450663, 0,
      -0.1408450663, 0.7042253595;
  CHECK((mode.omega_hat - oracle).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((mode.omega_hat - est.omega_hat).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("conjugacy: likelihood times prior kernel is the posterior kernel") {
  Philox4x32 rng(33);
  const int p = 5;
  const Graph g = band_graph(p, 1);
  const SampleCov s = make_sample_cov(random_spd(p, rng), 60);
  const PosteriorConfig cfg;
  const auto est = fit_mle(s, g);
  const auto prior = empirical_prior_params(est, g, cfg.delta);
  const auto post = conditional_posterior_params(est, g, s, cfg);
  std::vector<double> diffs;
  for (int t = 0; t < 50; ++t) {
    const Matrix w = random_spd_on(g, rng, 0.2 + rng.uniform01());
    diffs.push_back(cfg.alpha * log_likelihood(w, s) + gwishart_log_kernel(w, prior) -
                    gwishart_log_kernel(w, post));
  }
  double mean = 0;
  for (double d : diffs) mean += d / double(diffs.size());
  double var = 0;
  for (double d : diffs) var += (d - mean) * (d - mean) / double(diffs.size());
  CHECK(var < 1e-16);
  // The constant is the Gaussian normalization alone.
  CHECK(mean == doctest::Approx(-cfg.alpha * 60 * p / 2.0 * std::log(2 * std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("laplace cancellation") {
  Philox4x32 rng(34);
  for (int t = 0; t < 10; ++t) {
    const int p = 3 + int(rng() % 5);
    const Graph g = random_graph(p, 0.4, rng);
    const SampleCov s = make_sample_cov(random_spd(p, rng), 40);
    PosteriorConfig cfg;
    cfg.delta = 3 + 10 * rng.uniform01();
    // The closed form uses tr(Σ̂Ω̂) = p, which holds to the KKT tolerance times αn.
    cfg.mle.tol = 1e-13;
    const auto cancelled = score_graph(g, s, cfg);
    cfg.path = ScoringPath::laplace_ratio;
    const auto ratio = score_graph(g, s, cfg);
    CHECK(ratio.log_score == doctest::Approx(cancelled.log_score).epsilon(1e-10));

    const double an = cfg.alpha * double(s.n);
    const auto& w = cancelled.estimate.omega_hat;
    const double direct = cancelled.log_prior - cfg.alpha * double(s.n) * p / 2.0 * std::log(2 * std::numbers::pi) +
                          laplace_log_norm(cfg.delta + an - 2, w, g).log_value -
                          laplace_log_norm(cfg.delta - 2, w, g).log_value;
    CHECK(std::abs(direct - cancelled.log_score) <= 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("two-graph Laplace log-odds against exact constants") {
  // Frozen from tests/oracles/posterior_oracle.py: {δ, Laplace log-odds, exact log-odds}.
  const double table[3][3] = {{10, -2.3617319608975506, -2.2820849822597554},
                              {20, -2.72252451883779, -2.6887130317279219},
                              {30, -2.902434319146892, -2.8821443694413421}};
  Matrix sig(2, 2);
  sig << 1.0, 0.3, 0.3, 1.2;
  const SampleCov s = make_sample_cov(sig, 100);
  for (const auto& row : table) {
    PosteriorConfig cfg;
    cfg.delta = row[0];
    cfg.mle.tol = 1e-13;
    const double lap = score_graph(Graph(2), s, cfg).log_score - score_graph(Graph::complete(2), s, cfg).log_score;
    const double exact = exact_log_marginal(Graph(2), s, cfg) - exact_log_marginal(Graph::complete(2), s, cfg);
    CHECK(lap == doctest::Approx(row[1]).epsilon(1e-10));
    CHECK(exact == doctest::Approx(row[2]).epsilon(1e-10));
    // The prior-side Laplace bias leaves 0.08 at δ = 10; it falls below 0.05 from δ = 20.
    if (row[0] >= 20) CHECK(std::abs(lap - exact) < 0.05);
  }
}

TEST_CASE("monte carlo scoring path tracks the exact marginal") {
  Philox4x32 rng(36);
  const SampleCov s = make_sample_cov(random_spd(4, rng), 50);
  PosteriorConfig cfg;
  cfg.delta = 6;
  cfg.path = ScoringPath::monte_carlo;
  cfg.mc_samples = 4000;
  cfg.mc_seed = 5;
  const Graph g = path_graph(4);
  CHECK(score_graph(g, s, cfg).log_score == doctest::Approx(exact_log_marginal(g, s, cfg)).epsilon(1e-3));
}

TEST_CASE("bernoulli and exponential priors agree on score differences") {
  Philox4x32 rng(37);
  const int p = 6;
  const SampleCov s = make_sample_cov(random_spd(p, rng), 50);
  PosteriorConfig bern;
  bern.prior = GraphPrior::bernoulli(0.3);
  PosteriorConfig expo = bern;
  expo.prior = GraphPrior::exponential(std::log(0.7 / 0.3) / std::log(double(p)));
  const Graph base = random_graph(p, 0.3, rng);
  const double b0 = score_graph(base, s, bern).log_score, e0 = score_graph(base, s, expo).log_score;
  for (int t = 0; t < 20; ++t) {
    const Graph g = random_graph(p, 0.4, rng);
    const double db = score_graph(g, s, bern).log_score - b0;
    const double de = score_graph(g, s, expo).log_score - e0;
    CHECK(std::abs(db - de) <= 1e-12 * std::max(1.0, std::abs(db)));
  }
}

TEST_CASE("warm start scores match cold scores") {
  Philox4x32 rng(38);
  const int p = 7;
  const SampleCov s = make_sample_cov(random_spd(p, rng), 50);
  const PosteriorConfig cfg;
  const Graph g = random_graph(p, 0.3, rng);
  const auto cold = score_graph(g, s, cfg);
  const Graph g2 = flip_edge(g, 0, 1);
  const auto warm = score_graph(g2, s, cfg, cold.estimate.omega_hat);
  CHECK(warm.log_score == doctest::Approx(score_graph(g2, s, cfg).log_score).epsilon(1e-9));
}
