#pragma once

#include "egw/estimation.hpp"
#include "egw/gwishart.hpp"
#include "egw/graph.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace egw {

enum class PriorKind { bernoulli, exponential };

/// Bernoulli: π(G) ∝ q^|G| (1−q)^{R̄−|G|} 1(|G| ≤ r̄).
/// Exponential: π(G) ∝ exp(−a log(p) |G|).
struct GraphPrior {
  PriorKind kind = PriorKind::bernoulli;
  double q = 0.45;
  double a = 1.0;
  std::optional<std::size_t> max_edges;

  static GraphPrior bernoulli(double q, std::optional<std::size_t> max_edges = std::nullopt) {
    return {PriorKind::bernoulli, q, 1.0, max_edges};
  }
  static GraphPrior exponential(double a) { return {PriorKind::exponential, 0.45, a, std::nullopt}; }
};

void validate(const GraphPrior& prior);

/// How the ratio of normalizing constants is evaluated.
enum class ScoringPath {
  /// Shared-mode Laplace with |Q| cancelled (the production path).
  laplace_cancelled,
  /// Two separate Laplace approximations.
  laplace_ratio,
  /// Two Monte Carlo estimates.
  monte_carlo,
};

std::string_view to_string(ScoringPath path) noexcept;

struct PosteriorConfig {
  double delta = 4.0;
  double alpha = 0.99;
  GraphPrior prior;
  MleConfig mle;
  ScoringPath path = ScoringPath::laplace_cancelled;
  long mc_samples = 10000;
  std::uint64_t mc_seed = 0;
};

void validate(const PosteriorConfig& cfg);

struct GraphScore {
  double log_score = 0.0;
  double log_prior = 0.0;
  double log_lik_alpha = 0.0;
  double dim_penalty = 0.0;
  PrecisionEstimate estimate;
};

double log_graph_prior(const Graph& g, const GraphPrior& prior);

/// Unnormalized log marginal posterior of g:
/// log π(G) + α log L_n(Ω̂_G) + ((p+|G|)/2) log((δ−2)/(δ+αn−2)).
GraphScore score_graph(const Graph& g, const SampleCov& scov, const PosteriorConfig& cfg);
GraphScore score_graph(const Graph& g, const SampleCov& scov, const PosteriorConfig& cfg,
                       const Matrix& warm);

/// Empirical conditional prior W_G(δ, (δ−2)Ω̂⁻¹).
GWishartParams empirical_prior_params(const PrecisionEstimate& est, const Graph& g, double delta);

/// Fractional-likelihood conditional posterior W_G(δ+αn, αnΣ̂ + (δ−2)Ω̂⁻¹).
GWishartParams conditional_posterior_params(const PrecisionEstimate& est, const Graph& g,
                                            const SampleCov& scov, const PosteriorConfig& cfg);

/// (δ−2)/2 log|Ω| − ½ tr(DΩ): the G-Wishart log-kernel, without support checks.
double gwishart_log_kernel(const Matrix& omega, const GWishartParams& params);

}  // namespace egw
