#include "egw/gwishart.hpp"

#include "egw/random.hpp"

#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

namespace egw {

std::string_view to_string(NormConstMethod m) noexcept {
  switch (m) {
    case NormConstMethod::laplace: return "laplace";
    case NormConstMethod::monte_carlo: return "mc";
    case NormConstMethod::analytic: return "analytic";
  }
  return "unknown";
}

void validate(const GWishartParams& params) {
  if (!(params.delta > 2.0)) throw Error(Errc::invalid_argument, "G-Wishart shape must exceed 2");
  const int p = params.graph.p();
  if (params.scale_d.rows() != p || params.scale_d.cols() != p)
    throw Error(Errc::dimension_mismatch, "scale matrix does not match graph");
  if (!is_spd(params.scale_d)) throw Error(Errc::not_pd, "scale matrix is not positive definite");
}

double log_density(const Matrix& m, const GWishartParams& params, double log_norm) {
  const Graph& g = params.graph;
  if (m.rows() != g.p() || m.cols() != g.p())
    throw Error(Errc::dimension_mismatch, "log_density: dimension mismatch");
  for (int i = 0; i < g.p(); ++i)
    for (int j = i + 1; j < g.p(); ++j)
      if (!g.has_edge(i, j) && (std::abs(m(i, j)) > 1e-12 || std::abs(m(j, i)) > 1e-12))
        throw Error(Errc::support_violation, "matrix has a nonzero entry at a non-edge");
  return 0.5 * (params.delta - 2.0) * log_det_spd(m) - 0.5 * trace_of_product(params.scale_d, m) -
         log_norm;
}

NormConstEstimate laplace_log_norm(double b, const Matrix& omega_hat, const Graph& g) {
  if (!(b > 0.0)) throw Error(Errc::invalid_argument, "laplace_log_norm: b must be positive");
  const double p = double(g.p());
  const double dim = double(g.free_parameter_count());
  const double h_hat = log_det_spd(omega_hat) - p;
  const Matrix q = hessian_q(omega_hat, g);

  double log_det_q = 0.0;
  if (auto v = try_log_det_spd(q)) {
    log_det_q = *v;
  } else {
    std::clog << "warning: Q(Ω̂) Cholesky failed, falling back to LU\n";
    Eigen::PartialPivLU<Matrix> lu(q);
    log_det_q = lu.matrixLU().diagonal().array().abs().log().sum();
  }

  NormConstEstimate out;
  out.method = NormConstMethod::laplace;
  out.log_value = 0.5 * b * h_hat - 0.5 * log_det_q + 0.5 * dim * std::log(4.0 * std::numbers::pi / b);
  return out;
}

double log_norm_complete(double delta, const Matrix& d) {
  const auto r = int(d.rows());
  if (r == 0) return 0.0;
  const double a = 0.5 * (delta + double(r) - 1.0);
  return double(r) * a * std::numbers::ln2 + log_multivariate_gamma(a, r) - a * log_det_spd(d);
}

namespace {

Matrix submatrix(const Matrix& m, const std::vector<int>& idx) {
  Matrix out(Eigen::Index(idx.size()), Eigen::Index(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) out(Eigen::Index(a), Eigen::Index(b)) = m(idx[a], idx[b]);
  return out;
}

// Fixed per-problem quantities of the AKM estimator after vertex reordering.
struct AkmSetup {
  int p = 0;
  double delta = 0.0;
  Matrix t;                        // upper triangular, D⁻¹ = TᵀT
  std::vector<std::uint8_t> edge;  // dense p×p adjacency in the new order
  std::vector<int> nu;             // neighbours after i
  double log_c = 0.0;
};

AkmSetup make_akm_setup(const GWishartParams& params) {
  const Graph& g = params.graph;
  const int p = g.p();

  std::vector<int> order(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) order[std::size_t(i)] = i;
  if (auto elim = is_decomposable(g); elim.decomposable) order = elim.order;

  AkmSetup s;
  s.p = p;
  s.delta = params.delta;
  s.edge.assign(std::size_t(p) * std::size_t(p), 0);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b)
      if (a != b && g.has_edge(order[std::size_t(a)], order[std::size_t(b)]))
        s.edge[std::size_t(a) * std::size_t(p) + std::size_t(b)] = 1;

  const Matrix d = submatrix(params.scale_d, order);
  Eigen::LLT<Matrix> llt(spd_inverse(d));
  if (llt.info() != Eigen::Success) throw Error(Errc::not_pd, "scale matrix is not positive definite");
  s.t = llt.matrixU();

  s.nu.assign(std::size_t(p), 0);
  for (int i = 0; i < p; ++i) {
    int before = 0;
    for (int j = 0; j < p; ++j) {
      if (!s.edge[std::size_t(i) * std::size_t(p) + std::size_t(j)]) continue;
      if (j > i) ++s.nu[std::size_t(i)];
      else ++before;
    }
    const double nu = s.nu[std::size_t(i)];
    const double b = nu + 1.0 + before;
    s.log_c += 0.5 * (s.delta + 2.0 * nu) * std::numbers::ln2 + 0.5 * nu * std::log(std::numbers::pi) +
               std::lgamma(0.5 * (s.delta + nu)) + (s.delta + b - 1.0) * std::log(s.t(i, i));
  }
  return s;
}

// log of −½ Σ_{non-free} ψ_ij² for one draw of the free Ψ entries.
double akm_log_weight(const AkmSetup& s, Philox4x32& rng, Matrix& phi, Matrix& psi_t) {
  const int p = s.p;
  boost::random::normal_distribution<double> normal;
  double sum_sq = 0.0;
  phi.setZero();
  psi_t.setZero();
  for (int i = 0; i < p; ++i) {
    boost::random::chi_squared_distribution<double> chi(s.delta + double(s.nu[std::size_t(i)]));
    const double psi_ii = std::sqrt(chi(rng));
    psi_t(i, i) = psi_ii;
    phi(i, i) = psi_ii * s.t(i, i);
    for (int j = i + 1; j < p; ++j) {
      const auto len = Eigen::Index(j - i);
      if (s.edge[std::size_t(i) * std::size_t(p) + std::size_t(j)]) {
        const double psi_ij = normal(rng);
        psi_t(j, i) = psi_ij;
        phi(i, j) = psi_t.col(i).segment(i, len + 1).dot(s.t.col(j).segment(i, len + 1));
      } else {
        const double phi_ij =
            i == 0 ? 0.0 : -phi.col(i).head(i).dot(phi.col(j).head(i)) / phi(i, i);
        phi(i, j) = phi_ij;
        const double partial = psi_t.col(i).segment(i, len).dot(s.t.col(j).segment(i, len));
        const double psi_ij = (phi_ij - partial) / s.t(j, j);
        psi_t(j, i) = psi_ij;
        sum_sq += psi_ij * psi_ij;
      }
    }
  }
  // Overflow in the completion means exp(−½ Σψ²) underflows anyway.
  if (!std::isfinite(sum_sq)) return -std::numeric_limits<double>::infinity();
  return -0.5 * sum_sq;
}

}  // namespace

NormConstEstimate mc_log_norm(const GWishartParams& params, const MonteCarloOptions& opts) {
  validate(params);
  if (opts.n_samples < 1000) throw Error(Errc::invalid_argument, "mc_log_norm needs at least 1000 samples");
  if (opts.shards < 1) throw Error(Errc::invalid_argument, "mc_log_norm: shards must be positive");
  if (opts.deterministic && !opts.seed)
    throw Error(Errc::seed_required, "deterministic Monte Carlo requested without a seed");
  const std::uint64_t seed = opts.seed ? *opts.seed : std::uint64_t(std::random_device{}()) << 32 |
                                                          std::random_device{}();

  const AkmSetup setup = make_akm_setup(params);
  std::vector<double> log_w(std::size_t(opts.n_samples));
  const long per_shard = (opts.n_samples + opts.shards - 1) / opts.shards;

  auto run_shard = [&](int shard) {
    Philox4x32 rng(seed, std::uint64_t(shard));
    Matrix phi(setup.p, setup.p);
    Matrix psi_t(setup.p, setup.p);
    const long begin = long(shard) * per_shard;
    const long end = std::min(opts.n_samples, begin + per_shard);
    for (long k = begin; k < end; ++k) log_w[std::size_t(k)] = akm_log_weight(setup, rng, phi, psi_t);
  };

  const int workers = std::clamp(opts.workers, 1, opts.shards);
  if (workers == 1) {
    for (int s = 0; s < opts.shards; ++s) run_shard(s);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int s = w; s < opts.shards; s += workers) run_shard(s);
      });
  }

  const double max_lw = *std::max_element(log_w.begin(), log_w.end());
  if (!std::isfinite(max_lw)) throw Error(Errc::degenerate_draw, "every Monte Carlo weight underflowed");
  double mean = 0.0;
  double m2 = 0.0;
  long count = 0;
  for (double lw : log_w) {
    const double w = std::exp(lw - max_lw);
    ++count;
    const double delta = w - mean;
    mean += delta / double(count);
    m2 += delta * (w - mean);
  }
  const double var = count > 1 ? m2 / double(count - 1) : 0.0;

  NormConstEstimate out;
  out.method = NormConstMethod::monte_carlo;
  out.n_samples = opts.n_samples;
  out.log_value = setup.log_c + max_lw + std::log(mean);
  out.std_error = std::sqrt(var / double(count)) / mean;
  return out;
}

NormConstEstimate mc_log_norm(const GWishartParams& params, long n_samples, std::uint64_t seed) {
  MonteCarloOptions opts;
  opts.n_samples = n_samples;
  opts.seed = seed;
  return mc_log_norm(params, opts);
}

NormConstEstimate analytic_log_norm(const GWishartParams& params) {
  validate(params);
  const CliqueTree tree = clique_decomposition(params.graph);
  double value = 0.0;
  for (const auto& c : tree.cliques) value += log_norm_complete(params.delta, submatrix(params.scale_d, c));
  for (const auto& s : tree.separators)
    if (!s.empty()) value -= log_norm_complete(params.delta, submatrix(params.scale_d, s));
  NormConstEstimate out;
  out.method = NormConstMethod::analytic;
  out.log_value = value;
  return out;
}

}  // namespace egw
