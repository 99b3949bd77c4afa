#include "egw/estimation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace egw {

namespace {

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw Error(Errc::dimension_mismatch, std::string(what) + " must be a non-empty square matrix");
}

// Affine map of the spectrum into [1/ξ, ξ]; Ω ↦ aΩ + bI keeps the zero pattern.
Matrix apply_sieve(const Matrix& omega, double xi) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(omega, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double lo_bound = 1.0 / xi;
  if (lo >= lo_bound && hi <= xi) return omega;
  const double new_lo = std::clamp(lo, lo_bound, xi);
  const double new_hi = std::clamp(hi, lo_bound, xi);
  const auto p = omega.rows();
  if (hi - lo <= 0.0) return new_lo * Matrix::Identity(p, p);
  const double a = (new_hi - new_lo) / (hi - lo);
  return a * omega + (new_lo - a * lo) * Matrix::Identity(p, p);
}

double moment_violation(const Matrix& cov, const Matrix& target, const std::vector<Edge>& edges) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < cov.rows(); ++i) v = std::max(v, std::abs(cov(i, i) - target(i, i)));
  for (const Edge& e : edges) v = std::max(v, std::abs(cov(e.i, e.j) - target(e.i, e.j)));
  return v;
}

void finish(PrecisionEstimate& est, const SampleCov& scov, const std::vector<Edge>& edges, const MleConfig& cfg) {
  est.converged = est.max_violation <= cfg.tol;
  if (cfg.sieve_xi) {
    est.omega_hat = apply_sieve(est.omega_hat, *cfg.sieve_xi);
    est.max_violation = moment_violation(spd_inverse(est.omega_hat), scov.sigma_hat, edges);
  }
}

PrecisionEstimate run_ips(const SampleCov& scov, const Graph& g, const MleConfig& cfg, Matrix k) {
  const Matrix& target = scov.sigma_hat;
  const int p = scov.p();
  const auto edges = g.edges();
  const auto degree = g.degrees();

  PrecisionEstimate est;
  Matrix s = spd_inverse(k);
  est.max_violation = moment_violation(s, target, edges);
  Eigen::Matrix<double, Eigen::Dynamic, 2> cols(p, 2);
  while (est.max_violation > cfg.tol && est.iterations < cfg.max_iter) {
    for (const Edge& e : edges) {
      const std::array<int, 2> c{e.i, e.j};
      Eigen::Matrix2d s_cc;
      Eigen::Matrix2d t_cc;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          s_cc(a, b) = s(c[a], c[b]);
          t_cc(a, b) = target(c[a], c[b]);
        }
      const Eigen::Matrix2d s_cc_inv = s_cc.inverse();
      const Eigen::Matrix2d delta_k = t_cc.inverse() - s_cc_inv;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) k(c[a], c[b]) += delta_k(a, b);
      // Σ ← Σ + Σ_{·C} Σ_CC⁻¹ (Σ̂_CC − Σ_CC) Σ_CC⁻¹ Σ_{C·}
      cols.col(0) = s.col(c[0]);
      cols.col(1) = s.col(c[1]);
      const Eigen::Matrix2d middle = s_cc_inv * (t_cc - s_cc) * s_cc_inv;
      s.noalias() += cols * middle * cols.transpose();
    }
    for (int i = 0; i < p; ++i) {
      if (degree[std::size_t(i)] != 0) continue;
      const double sii = s(i, i);
      k(i, i) += 1.0 / target(i, i) - 1.0 / sii;
      const Vector col = s.col(i);
      s.noalias() += ((target(i, i) - sii) / (sii * sii)) * col * col.transpose();
    }
    ++est.iterations;
    k = 0.5 * (k + k.transpose()).eval();
    s = spd_inverse(k);
    est.max_violation = moment_violation(s, target, edges);
  }

  est.omega_hat = std::move(k);
  finish(est, scov, edges, cfg);
  return est;
}

// Damped Newton ascent of log|K| − tr(Σ̂K) over the diagonal and edge
// coordinates. Returns nullopt when the Hessian solve or the step search breaks
// down, so the caller can hand over to IPS.
std::optional<PrecisionEstimate> run_newton(const SampleCov& scov, const Graph& g, const MleConfig& cfg,
                                            Matrix k) {
  const Matrix& target = scov.sigma_hat;
  const int p = scov.p();
  const auto edges = g.edges();
  const auto m = Eigen::Index(p) + Eigen::Index(edges.size());
  std::vector<std::array<int, 2>> coord;
  coord.reserve(std::size_t(m));
  for (int i = 0; i < p; ++i) coord.push_back({i, i});
  for (const Edge& e : edges) coord.push_back({e.i, e.j});

  PrecisionEstimate est;
  Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Matrix w = llt.solve(Matrix::Identity(p, p));
  est.max_violation = moment_violation(w, target, edges);
  Matrix hess(m, m);
  Vector grad(m);
  // Once under tol, one more full step: quadratic convergence puts it at rounding level.
  bool polishing = false;
  while (est.iterations < cfg.max_iter) {
    if (est.max_violation <= cfg.tol) {
      if (polishing) break;
      polishing = true;
    }
    for (Eigen::Index a = 0; a < m; ++a) {
      const auto [i, j] = coord[std::size_t(a)];
      grad(a) = (i == j ? 1.0 : 2.0) * (w(i, j) - target(i, j));
      for (Eigen::Index b = 0; b <= a; ++b) {
        const auto [u, v] = coord[std::size_t(b)];
        double h;
        if (i == j && u == v) h = w(i, u) * w(i, u);
        else if (i == j) h = 2.0 * w(i, u) * w(i, v);
        else if (u == v) h = 2.0 * w(u, i) * w(u, j);
        else h = 2.0 * (w(i, u) * w(j, v) + w(i, v) * w(j, u));
        hess(a, b) = h;
      }
    }
    Eigen::LLT<Matrix, Eigen::Lower> hllt(hess);
    if (hllt.info() != Eigen::Success) return std::nullopt;
    const Vector dir = hllt.solve(grad);
    const double decrement = std::sqrt(std::max(0.0, grad.dot(dir)));
    if (!std::isfinite(decrement)) return std::nullopt;
    Matrix step = Matrix::Zero(p, p);
    for (Eigen::Index a = 0; a < m; ++a) {
      const auto [i, j] = coord[std::size_t(a)];
      step(i, j) = dir(a);
      step(j, i) = dir(a);
    }
    // 1/(1+λ) keeps a self-concordant barrier inside its domain.
    double t = decrement < 0.25 ? 1.0 : 1.0 / (1.0 + decrement);
    Matrix trial;
    for (int halvings = 0;; ++halvings) {
      if (halvings == 30) return std::nullopt;
      trial = k + t * step;
      llt.compute(trial);
      if (llt.info() == Eigen::Success) break;
      t *= 0.5;
    }
    Matrix w_trial = llt.solve(Matrix::Identity(p, p));
    w_trial = 0.5 * (w_trial + w_trial.transpose()).eval();
    const double previous = est.max_violation;
    const double violation = moment_violation(w_trial, target, edges);
    if (polishing && violation >= previous) break;
    k = std::move(trial);
    w = std::move(w_trial);
    ++est.iterations;
    est.max_violation = violation;
    // Rounding floor: a full step that no longer helps means we are done.
    if (t == 1.0 && est.max_violation >= previous && est.max_violation < 1e3 * cfg.tol) break;
  }

  est.omega_hat = std::move(k);
  finish(est, scov, edges, cfg);
  return est;
}

PrecisionEstimate solve(const SampleCov& scov, const Graph& g, const MleConfig& cfg, Matrix start) {
  const bool newton = cfg.solver == MleSolver::newton ||
                      (cfg.solver == MleSolver::automatic && g.free_parameter_count() <= cfg.newton_max_params);
  if (newton) {
    if (auto est = run_newton(scov, g, cfg, start)) return *std::move(est);
  }
  return run_ips(scov, g, cfg, std::move(start));
}

void check_inputs(const SampleCov& scov, const Graph& g, const MleConfig& cfg) {
  if (scov.p() != g.p()) throw Error(Errc::dimension_mismatch, "fit_mle: Σ̂ and graph disagree on p");
  if (!(cfg.tol > 0.0)) throw Error(Errc::invalid_argument, "fit_mle: tol must be positive");
  if (cfg.sieve_xi && !(*cfg.sieve_xi > 1.0))
    throw Error(Errc::invalid_argument, "fit_mle: sieve bound must exceed 1");
  if (!is_spd(scov.sigma_hat)) throw Error(Errc::not_pd, "fit_mle: Σ̂ is singular or indefinite");
}

Matrix cold_start(const SampleCov& scov) {
  return scov.sigma_hat.diagonal().cwiseInverse().asDiagonal();
}

}  // namespace

SampleCov make_sample_cov(Matrix sigma_hat, long n) {
  check_square(sigma_hat, "Σ̂");
  if (n < 0) throw Error(Errc::invalid_argument, "sample size must be non-negative");
  if (!sigma_hat.allFinite()) throw Error(Errc::invalid_argument, "Σ̂ contains non-finite values");
  if ((sigma_hat - sigma_hat.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, sigma_hat.cwiseAbs().maxCoeff()))
    throw Error(Errc::invalid_argument, "Σ̂ is not symmetric");
  if ((sigma_hat.diagonal().array() <= 0.0).any())
    throw Error(Errc::invalid_argument, "Σ̂ has a non-positive diagonal entry");
  Matrix sym = 0.5 * (sigma_hat + sigma_hat.transpose());
  return {std::move(sym), n};
}

SampleCov sample_cov_from_data(const Matrix& x, const DataOptions& opts) {
  if (x.rows() == 0 || x.cols() == 0) throw Error(Errc::invalid_argument, "empty data matrix");
  if (!x.allFinite()) throw Error(Errc::invalid_argument, "data contains NaN or infinite values");
  Matrix centered = x;
  if (opts.center) centered.rowwise() -= x.colwise().mean();
  if (opts.standardize) {
    const double n = double(x.rows());
    for (Eigen::Index j = 0; j < centered.cols(); ++j) {
      const double sd = std::sqrt(centered.col(j).squaredNorm() / n);
      if (!(sd > 0.0)) throw Error(Errc::invalid_argument, "column with zero variance");
      centered.col(j) /= sd;
    }
  }
  Matrix sigma = (centered.transpose() * centered) / double(x.rows());
  return make_sample_cov(std::move(sigma), long(x.rows()));
}

PrecisionEstimate fit_mle(const SampleCov& scov, const Graph& g, const MleConfig& cfg) {
  check_inputs(scov, g, cfg);
  if (g.edge_count() == g.max_edges() && g.p() > 1) {
    PrecisionEstimate est;
    est.omega_hat = spd_inverse(scov.sigma_hat);
    est.iterations = 1;
    est.max_violation = kkt_violation(est.omega_hat, scov, g);
    est.converged = true;
    if (cfg.sieve_xi) {
      est.omega_hat = apply_sieve(est.omega_hat, *cfg.sieve_xi);
      est.max_violation = kkt_violation(est.omega_hat, scov, g);
    }
    return est;
  }
  return solve(scov, g, cfg, cold_start(scov));
}

PrecisionEstimate fit_mle(const SampleCov& scov, const Graph& g, const MleConfig& cfg,
                          const Matrix& warm) {
  check_inputs(scov, g, cfg);
  if (warm.rows() != scov.p() || warm.cols() != scov.p()) return fit_mle(scov, g, cfg);
  if (g.edge_count() == g.max_edges() && g.p() > 1) return fit_mle(scov, g, cfg);
  Matrix start = restrict_to_graph(warm, g);
  if (!is_spd(start)) start = cold_start(scov);
  return solve(scov, g, cfg, std::move(start));
}

double kkt_violation(const Matrix& omega, const SampleCov& scov, const Graph& g) {
  const Matrix s = spd_inverse(omega);
  double v = 0.0;
  for (int i = 0; i < g.p(); ++i) v = std::max(v, std::abs(s(i, i) - scov.sigma_hat(i, i)));
  for (const Edge& e : g.edges()) v = std::max(v, std::abs(s(e.i, e.j) - scov.sigma_hat(e.i, e.j)));
  return v;
}

double log_likelihood(const Matrix& omega, const SampleCov& scov) {
  if (omega.rows() != scov.p() || omega.cols() != scov.p())
    throw Error(Errc::dimension_mismatch, "log_likelihood: dimension mismatch");
  const double logdet = log_det_spd(omega);
  if (scov.n == 0) return 0.0;
  const double n = double(scov.n);
  const double p = double(scov.p());
  return -0.5 * n * p * std::log(2.0 * std::numbers::pi) + 0.5 * n * logdet -
         0.5 * n * trace_of_product(scov.sigma_hat, omega);
}

Matrix restrict_to_graph(const Matrix& m, const Graph& g) {
  Matrix out = m.diagonal().asDiagonal();
  for (const Edge& e : g.edges()) {
    const double v = 0.5 * (m(e.i, e.j) + m(e.j, e.i));
    out(e.i, e.j) = v;
    out(e.j, e.i) = v;
  }
  return out;
}

bool supported_on(const Matrix& m, const Graph& g, double tol) {
  for (int i = 0; i < g.p(); ++i)
    for (int j = i + 1; j < g.p(); ++j)
      if (!g.has_edge(i, j) && (std::abs(m(i, j)) > tol || std::abs(m(j, i)) > tol)) return false;
  return true;
}

}  // namespace egw
