#pragma once

#include "egw/core.hpp"
#include "egw/graph.hpp"
#include "egw/linalg.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace egw {

/// W_G(δ, D): density ∝ |M|^{(δ−2)/2} exp{−½ tr(DM)} on P_G.
struct GWishartParams {
  double delta = 3.0;
  Matrix scale_d;
  Graph graph;
};

void validate(const GWishartParams& params);

enum class NormConstMethod { laplace, monte_carlo, analytic };

std::string_view to_string(NormConstMethod m) noexcept;

struct NormConstEstimate {
  double log_value = 0.0;
  NormConstMethod method = NormConstMethod::laplace;
  double std_error = 0.0;
  long n_samples = 0;
};

double log_density(const Matrix& m, const GWishartParams& params, double log_norm);

/// Negative Hessian of h at Ω̂ over the free coordinates of ParamIndex(g):
/// Q_ab = tr(Ω̂⁻¹ E_a Ω̂⁻¹ E_b).
template <typename Derived>
MatrixX<typename Derived::Scalar> hessian_q(const Eigen::MatrixBase<Derived>& omega_hat, const Graph& g) {
  using Scalar = typename Derived::Scalar;
  if (omega_hat.rows() != g.p() || omega_hat.cols() != g.p())
    throw Error(Errc::dimension_mismatch, "hessian_q: dimension mismatch");
  const MatrixX<Scalar> s = spd_inverse(omega_hat);
  const ParamIndex index(g);
  const auto& pos = index.positions();
  const auto d = Eigen::Index(pos.size());
  MatrixX<Scalar> q(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    const auto [i, j] = pos[std::size_t(a)];
    for (Eigen::Index b = a; b < d; ++b) {
      const auto [l, m] = pos[std::size_t(b)];
      // Each off-diagonal index doubles the trace; a diagonal pair counts the
      // symmetric product once.
      const int off = int(i != j) + int(l != m);
      const Scalar weight = off == 2 ? Scalar(2) : off == 1 ? Scalar(1) : Scalar(0.5);
      const Scalar v = weight * (s(i, l) * s(j, m) + s(i, m) * s(j, l));
      q(a, b) = v;
      q(b, a) = v;
    }
  }
  return q;
}

/// Laplace approximation of ∫_{P_G} exp{(b/2) h(Ω)} dΩ around Ω̂:
/// (b/2) h(Ω̂) − ½ log|Q(Ω̂)| + ((p+|G|)/2) log(4π/b).
/// b = δ−2 gives the prior constant, b = δ+αn−2 the posterior constant.
NormConstEstimate laplace_log_norm(double b, const Matrix& omega_hat, const Graph& g);

struct MonteCarloOptions {
  long n_samples = 10000;
  std::optional<std::uint64_t> seed;
  /// Independent Philox streams; the estimate depends on this, not on workers.
  int shards = 1;
  int workers = 1;
  bool deterministic = true;
};

/// Atay-Kayis & Massam importance-sampling estimate of log I_G(δ, D).
NormConstEstimate mc_log_norm(const GWishartParams& params, const MonteCarloOptions& opts);
NormConstEstimate mc_log_norm(const GWishartParams& params, long n_samples, std::uint64_t seed);

/// log I for the complete graph on dim(D) vertices.
double log_norm_complete(double delta, const Matrix& d);

/// Clique/separator factorization; throws NotDecomposable otherwise.
NormConstEstimate analytic_log_norm(const GWishartParams& params);

}  // namespace egw
