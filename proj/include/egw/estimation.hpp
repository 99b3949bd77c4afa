#pragma once

#include "egw/core.hpp"
#include "egw/graph.hpp"
#include "egw/linalg.hpp"

#include <optional>

namespace egw {

/// Sample covariance Σ̂ = n⁻¹XᵀX and its sample size.
struct SampleCov {
  Matrix sigma_hat;
  long n = 0;

  int p() const noexcept { return int(sigma_hat.rows()); }
};

struct DataOptions {
  bool center = true;
  bool standardize = false;
};

/// Builds Σ̂ from an n×p data matrix. Rejects NaNs and zero-variance columns.
SampleCov sample_cov_from_data(const Matrix& x, const DataOptions& opts = {});

/// Validates shape, symmetry and positive diagonal of a precomputed Σ̂.
SampleCov make_sample_cov(Matrix sigma_hat, long n);

enum class MleSolver {
  /// Newton while the free-parameter count is at most newton_max_params, IPS above.
  automatic,
  ips,
  newton,
};

struct MleConfig {
  double tol = 1e-8;
  int max_iter = 10000;
  /// Eigenvalue bound ξ of the sieve; unset means the full cone P_G.
  std::optional<double> sieve_xi;
  MleSolver solver = MleSolver::automatic;
  std::size_t newton_max_params = 400;
};

struct PrecisionEstimate {
  Matrix omega_hat;
  bool converged = false;
  int iterations = 0;
  double max_violation = 0.0;
};

/// Graph-constrained MLE of the precision matrix. IPS cycles over the edges
/// and isolated vertices of g; the Newton path takes damped steps on the free
/// coordinates and falls back to IPS if a step cannot be made.
PrecisionEstimate fit_mle(const SampleCov& scov, const Graph& g, const MleConfig& cfg = {});

/// Same, starting from `warm` (projected onto the support of g; ignored when
/// the projection is not positive definite).
PrecisionEstimate fit_mle(const SampleCov& scov, const Graph& g, const MleConfig& cfg,
                          const Matrix& warm);

/// max over E ∪ diag of |(Ω⁻¹)_ij − Σ̂_ij|.
double kkt_violation(const Matrix& omega, const SampleCov& scov, const Graph& g);

/// log L_n(Ω) = −(np/2) log 2π + (n/2) log|Ω| − (n/2) tr(Σ̂Ω).
double log_likelihood(const Matrix& omega, const SampleCov& scov);

/// h(Ω) = log|Ω| − tr(Ω̂⁻¹Ω).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar h_value(const Eigen::MatrixBase<DerivedA>& omega,
                                  const Eigen::MatrixBase<DerivedB>& omega_hat) {
  if (omega.rows() != omega_hat.rows())
    throw Error(Errc::dimension_mismatch, "h_value: dimension mismatch");
  const auto inv_hat = spd_inverse(omega_hat);
  return log_det_spd(omega) - trace_of_product(inv_hat, omega);
}

/// Zeros every off-graph entry of a symmetric matrix.
Matrix restrict_to_graph(const Matrix& m, const Graph& g);

/// True when every off-graph entry of m is within tol of zero.
bool supported_on(const Matrix& m, const Graph& g, double tol = 1e-12);

}  // namespace egw
