#pragma once

#include "egw/core.hpp"
#include "egw/estimation.hpp"
#include "egw/graph.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace egw {

enum class ModelId { ar1, ar2, star, random };

std::string_view to_string(ModelId id) noexcept;
std::optional<ModelId> parse_model_id(std::string_view name) noexcept;

struct SimulationTruth {
  Matrix omega_star;
  Graph graph_star;
  ModelId model = ModelId::ar1;
  int p = 0;
  std::uint64_t seed = 0;

  Matrix sigma_star() const;
};

/// Σ with entries ρ^|i−j|.
Matrix ar1_covariance(int p, double rho);

/// D^{−1/2} Ω D^{−1/2} with D = diag(Ω).
Matrix standardize_precision(const Matrix& omega);

/// Off-diagonal support of Ω with |ω_ij| > threshold.
Graph graph_from_support(const Matrix& omega, double threshold = 1e-12);

/// Σ* = 0.7^|i−j|, Ω* = Σ*⁻¹ standardized to unit diagonal.
SimulationTruth model_ar1(int p);
/// Unit diagonal, 0.5 on the first and 0.25 on the second off-diagonal.
SimulationTruth model_ar2(int p);
/// Hub vertex 0 joined to every other vertex with weight 0.1.
SimulationTruth model_star(int p);
/// B symmetric with off-diagonals 0.5 w.p. 0.05; Ω* = B + τI with condition
/// number p, then standardized.
SimulationTruth model_random(int p, std::uint64_t seed);

SimulationTruth make_model(ModelId id, int p, std::uint64_t seed);

/// n rows drawn iid from N_p(0, Σ*) through the Cholesky factor of Σ*.
Matrix sample_data(const SimulationTruth& truth, long n, std::uint64_t seed);

/// Σ̂ = n⁻¹XᵀX for data drawn by sample_data (no centering; the mean is known).
SampleCov sample_mvn(const SimulationTruth& truth, long n, std::uint64_t seed);

}  // namespace egw
