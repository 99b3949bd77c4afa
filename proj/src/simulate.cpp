#include "egw/simulate.hpp"

#include "egw/linalg.hpp"
#include "egw/random.hpp"

#include <Eigen/Eigenvalues>
#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include <cmath>

namespace egw {

std::string_view to_string(ModelId id) noexcept {
  switch (id) {
    case ModelId::ar1: return "ar1";
    case ModelId::ar2: return "ar2";
    case ModelId::star: return "star";
    case ModelId::random: return "random";
  }
  return "unknown";
}

std::optional<ModelId> parse_model_id(std::string_view name) noexcept {
  if (name == "ar1") return ModelId::ar1;
  if (name == "ar2") return ModelId::ar2;
  if (name == "star") return ModelId::star;
  if (name == "random") return ModelId::random;
  return std::nullopt;
}

Matrix SimulationTruth::sigma_star() const { return spd_inverse(omega_star); }

Matrix ar1_covariance(int p, double rho) {
  Matrix s(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) s(i, j) = std::pow(rho, std::abs(i - j));
  return s;
}

Matrix standardize_precision(const Matrix& omega) {
  const Vector scale = omega.diagonal().cwiseSqrt().cwiseInverse();
  Matrix out = scale.asDiagonal() * omega * scale.asDiagonal();
  // mirror so the result is exactly symmetric
  out.triangularView<Eigen::StrictlyLower>() = out.transpose();
  out.diagonal().setOnes();
  return out;
}

Graph graph_from_support(const Matrix& omega, double threshold) {
  const int p = int(omega.rows());
  std::vector<Edge> edges;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (std::abs(omega(i, j)) > threshold) edges.push_back({i, j});
  return Graph(p, edges);
}

namespace {

void require_p(int p, int min_p, const char* model) {
  if (p < min_p)
    throw Error(Errc::invalid_argument, std::string(model) + " needs p >= " + std::to_string(min_p));
}

SimulationTruth finish(Matrix omega, ModelId id, std::uint64_t seed) {
  if (!is_spd(omega)) throw Error(Errc::not_pd, "generated precision matrix is not positive definite");
  SimulationTruth t;
  t.p = int(omega.rows());
  t.graph_star = graph_from_support(omega);
  t.omega_star = std::move(omega);
  t.model = id;
  t.seed = seed;
  return t;
}

}  // namespace

SimulationTruth model_ar1(int p) {
  require_p(p, 2, "ar1");
  Matrix omega = spd_inverse(ar1_covariance(p, 0.7));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (std::abs(i - j) > 1) {
        if (std::abs(omega(i, j)) > 1e-10)
          throw Error(Errc::not_pd, "AR(1) inverse is not numerically tridiagonal");
        omega(i, j) = 0.0;
      }
  return finish(standardize_precision(omega), ModelId::ar1, 0);
}

SimulationTruth model_ar2(int p) {
  require_p(p, 3, "ar2");
  Matrix omega = Matrix::Identity(p, p);
  for (int i = 1; i < p; ++i) omega(i, i - 1) = omega(i - 1, i) = 0.5;
  for (int i = 2; i < p; ++i) omega(i, i - 2) = omega(i - 2, i) = 0.25;
  return finish(std::move(omega), ModelId::ar2, 0);
}

SimulationTruth model_star(int p) {
  require_p(p, 2, "star");
  Matrix omega = Matrix::Identity(p, p);
  for (int i = 1; i < p; ++i) omega(0, i) = omega(i, 0) = 0.1;
  return finish(std::move(omega), ModelId::star, 0);
}

SimulationTruth model_random(int p, std::uint64_t seed) {
  require_p(p, 2, "random");
  Philox4x32 rng(seed, 0x52414e44ull);
  boost::random::bernoulli_distribution<double> coin(0.05);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix b = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j)
        if (coin(rng)) b(i, j) = b(j, i) = 0.5;
    if (b.isZero(0.0)) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(b, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    const double tau = (lmax - double(p) * lmin) / double(p - 1);
    Matrix omega = b + tau * Matrix::Identity(p, p);
    return finish(standardize_precision(omega), ModelId::random, seed);
  }
  throw Error(Errc::degenerate_draw, "random model drew an empty graph 100 times");
}

SimulationTruth make_model(ModelId id, int p, std::uint64_t seed) {
  switch (id) {
    case ModelId::ar1: return model_ar1(p);
    case ModelId::ar2: return model_ar2(p);
    case ModelId::star: return model_star(p);
    case ModelId::random: return model_random(p, seed);
  }
  throw Error(Errc::invalid_argument, "unknown model");
}

Matrix sample_data(const SimulationTruth& truth, long n, std::uint64_t seed) {
  if (n < 1) throw Error(Errc::invalid_argument, "sample size must be at least 1");
  const Matrix sigma = truth.sigma_star();
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success) throw Error(Errc::not_pd, "Σ* is not positive definite");
  const Matrix l = llt.matrixL();
  Philox4x32 rng(seed);
  boost::random::normal_distribution<double> normal;
  Matrix z(n, truth.p);
  for (long r = 0; r < n; ++r)
    for (int c = 0; c < truth.p; ++c) z(r, c) = normal(rng);
  return z * l.transpose();
}

SampleCov sample_mvn(const SimulationTruth& truth, long n, std::uint64_t seed) {
  const Matrix x = sample_data(truth, n, seed);
  Matrix s = (x.transpose() * x) / double(n);
  return {0.5 * (s + s.transpose()), n};
}

}  // namespace egw
