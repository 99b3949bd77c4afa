#pragma once

#include "egw/core.hpp"
#include "egw/graph.hpp"
#include "egw/posterior.hpp"

#include <cstdint>
#include <unordered_map>
#include <variant>
#include <vector>

namespace egw {

enum class ProposalKind {
  /// Flip one of the p(p−1)/2 positions chosen uniformly (symmetric).
  uniform_position,
  /// Add or remove with probability ½ each, with the Hastings correction.
  add_remove,
  /// The same moves treated as symmetric. Away from the empty and complete
  /// graphs the chain then targets π(G)/C(R̄, |G|) rather than π(G), which
  /// favours sparse graphs. Kept for comparison runs only.
  add_remove_naive,
};

struct InitEmpty {};
struct InitRandom {
  double q0 = 0.1;
};
using ChainInit = std::variant<InitEmpty, InitRandom, Graph>;

struct McmcConfig {
  /// Total iterations, burn-in included.
  long n_iter = 24000;
  long burn_in = 4000;
  std::uint64_t seed = 1;
  long thin = 1;
  ChainInit init = InitEmpty{};
  ProposalKind proposal = ProposalKind::uniform_position;
  bool use_cache = true;
  /// LRU capacity of the score cache; 0 means unbounded.
  std::size_t cache_cap = 0;
  /// Re-fit cold every 1000 iterations and compare against the warm-started fit.
  bool verify_warm_start = false;
};

void validate(const McmcConfig& cfg);

struct ChainSample {
  long iter = 0;
  std::uint64_t graph_hash = 0;
  std::size_t size = 0;
  double log_score = 0.0;
  bool accepted = false;
};

struct ChainResult {
  int p = 0;
  std::vector<ChainSample> samples;
  std::unordered_map<std::uint64_t, Graph> graphs;
  double acceptance_rate = 0.0;
  Matrix edge_freq;
  std::int64_t wall_time_ns = 0;
  long cache_hits = 0;
  long score_evaluations = 0;
  /// Largest warm-versus-cold Ω̂ discrepancy seen when verify_warm_start is on.
  double warm_start_max_diff = 0.0;
};

/// Source of unnormalized log scores for the Metropolis–Hastings loop.
class GraphScorer {
 public:
  virtual ~GraphScorer() = default;
  virtual double score(const Graph& g) = 0;
  /// Called when g becomes the current state.
  virtual void accept(const Graph& g) { (void)g; }
};

ChainResult run_metropolis(int p, GraphScorer& scorer, const McmcConfig& mcmc);

/// MH over graphs scored by the Laplace-approximated marginal posterior.
ChainResult run_chain(const SampleCov& scov, const PosteriorConfig& cfg, const McmcConfig& mcmc);

Matrix edge_inclusion(const ChainResult& chain);

/// Edges whose inclusion frequency strictly exceeds the threshold.
Graph median_probability_model(const Matrix& freq, double threshold = 0.5);

struct DegreePosterior {
  /// degree_prob(v, d) = P(deg v = d), d = 0..p−1.
  Matrix degree_prob;
  /// rank_prob(v, k) = P(rank v = 1 + k/2); ranks are averaged over ties.
  Matrix rank_prob;
  Vector mean_degree;
  Vector mean_rank;
};

/// Average ranks (1 = highest degree) with ties sharing the mean position.
std::vector<double> degree_ranks(const std::vector<int>& degrees);

DegreePosterior degree_posterior(const ChainResult& chain);

}  // namespace egw
