#include "egw/sampler.hpp"

#include "egw/random.hpp"

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <list>
#include <numeric>
#include <optional>

namespace egw {

void validate(const McmcConfig& cfg) {
  if (cfg.burn_in < 0 || cfg.n_iter < cfg.burn_in)
    throw Error(Errc::invalid_argument, "MCMC needs 0 <= burn_in <= n_iter");
  if (cfg.thin < 1) throw Error(Errc::invalid_argument, "thin must be at least 1");
  if (const auto* r = std::get_if<InitRandom>(&cfg.init); r && !(r->q0 >= 0.0 && r->q0 <= 1.0))
    throw Error(Errc::invalid_argument, "random init probability must lie in [0, 1]");
}

namespace {

class ScoreCache {
 public:
  explicit ScoreCache(std::size_t cap) : cap_(cap) {}

  std::optional<double> find(const Graph& g) {
    auto it = map_.find(g);
    if (it == map_.end()) return std::nullopt;
    if (cap_ > 0) order_.splice(order_.begin(), order_, it->second.second);
    return it->second.first;
  }

  void insert(const Graph& g, double score) {
    if (cap_ > 0) {
      order_.push_front(g);
      map_.insert_or_assign(g, std::make_pair(score, order_.begin()));
      if (map_.size() > cap_) {
        map_.erase(order_.back());
        order_.pop_back();
      }
    } else {
      map_.insert_or_assign(g, std::make_pair(score, order_.end()));
    }
  }

 private:
  std::size_t cap_;
  std::list<Graph> order_;
  std::unordered_map<Graph, std::pair<double, std::list<Graph>::iterator>> map_;
};

struct Proposal {
  Graph graph;
  double log_hastings = 0.0;
};

Proposal propose(const Graph& g, ProposalKind kind, Philox4x32& rng) {
  const std::size_t total = g.max_edges();
  if (kind == ProposalKind::uniform_position) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, total - 1);
    const Edge e = g.pair_at(pick(rng));
    return {flip_edge(g, e.i, e.j), 0.0};
  }

  // add/remove: direction probability c(G) is ½ except at the empty and
  // complete graphs where the move is forced.
  auto direction_prob = [total](std::size_t m) { return (m == 0 || m == total) ? 1.0 : 0.5; };
  const std::size_t m = g.edge_count();
  bool add = m == 0;
  if (m != 0 && m != total) add = boost::random::bernoulli_distribution<double>(0.5)(rng);
  const std::size_t pool = add ? total - m : m;
  boost::random::uniform_int_distribution<std::size_t> pick(0, pool - 1);
  std::size_t target = pick(rng);
  Edge chosen{};
  for (std::size_t k = 0; k < total; ++k) {
    const Edge e = g.pair_at(k);
    if (g.has_edge(e.i, e.j) != add) {
      if (target == 0) {
        chosen = e;
        break;
      }
      --target;
    }
  }
  Graph next = flip_edge(g, chosen.i, chosen.j);
  if (kind == ProposalKind::add_remove_naive) return {std::move(next), 0.0};
  const std::size_t m_next = next.edge_count();
  const double forward = std::log(direction_prob(m)) - std::log(double(pool));
  const double reverse_pool = add ? double(m_next) : double(total - m_next);
  const double reverse = std::log(direction_prob(m_next)) - std::log(reverse_pool);
  return {std::move(next), reverse - forward};
}

Graph initial_graph(int p, const ChainInit& init, Philox4x32& rng) {
  if (std::holds_alternative<Graph>(init)) {
    const Graph& g = std::get<Graph>(init);
    if (g.p() != p) throw Error(Errc::dimension_mismatch, "initial graph has the wrong vertex count");
    return g;
  }
  Graph g(p);
  if (const auto* r = std::get_if<InitRandom>(&init)) {
    boost::random::bernoulli_distribution<double> coin(r->q0);
    for (std::size_t k = 0; k < g.max_edges(); ++k) {
      const Edge e = g.pair_at(k);
      if (coin(rng)) g = flip_edge(g, e.i, e.j);
    }
  }
  return g;
}

class PosteriorScorer final : public GraphScorer {
 public:
  PosteriorScorer(const SampleCov& scov, const PosteriorConfig& cfg, bool verify)
      : scov_(scov), cfg_(cfg), verify_(verify) {}

  double score(const Graph& g) override {
    GraphScore s = current_.size() == 0 ? score_graph(g, scov_, cfg_)
                                        : score_graph(g, scov_, cfg_, current_);
    pending_hash_ = g.hash();
    pending_ = std::move(s.estimate.omega_hat);
    return s.log_score;
  }

  void accept(const Graph& g) override {
    ++accepted_;
    if (g.hash() == pending_hash_ && pending_.size() != 0) current_ = pending_;
    if (verify_ && accepted_ % 1000 == 0 && current_.size() != 0 && g.hash() == pending_hash_) {
      const auto cold = fit_mle(scov_, g, cfg_.mle);
      max_diff_ = std::max(max_diff_, (cold.omega_hat - current_).cwiseAbs().maxCoeff());
    }
  }

  double max_diff() const noexcept { return max_diff_; }

 private:
  const SampleCov& scov_;
  const PosteriorConfig& cfg_;
  bool verify_;
  Matrix current_;
  Matrix pending_;
  std::uint64_t pending_hash_ = 0;
  long accepted_ = 0;
  double max_diff_ = 0.0;
};

}  // namespace

ChainResult run_metropolis(int p, GraphScorer& scorer, const McmcConfig& mcmc) {
  validate(mcmc);
  if (p < 2) throw Error(Errc::invalid_argument, "graph sampling needs p >= 2");
  const auto start = std::chrono::steady_clock::now();

  Philox4x32 rng(mcmc.seed);
  ScoreCache cache(mcmc.cache_cap);
  ChainResult out;
  out.p = p;
  out.edge_freq = Matrix::Zero(p, p);

  auto evaluate = [&](const Graph& g) {
    if (mcmc.use_cache) {
      if (auto hit = cache.find(g)) {
        ++out.cache_hits;
        return *hit;
      }
    }
    ++out.score_evaluations;
    const double s = scorer.score(g);
    if (mcmc.use_cache) cache.insert(g, s);
    return s;
  };

  Graph current = initial_graph(p, mcmc.init, rng);
  double current_score = evaluate(current);
  scorer.accept(current);

  long accepted = 0;
  for (long iter = 0; iter < mcmc.n_iter; ++iter) {
    Proposal prop = propose(current, mcmc.proposal, rng);
    const double u = rng.uniform01();
    const double proposal_score = evaluate(prop.graph);
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    bool accept = false;
    if (proposal_score != neg_inf) {
      accept = current_score == neg_inf ||
               std::log(u) < proposal_score - current_score + prop.log_hastings;
    }
    if (accept) {
      current = std::move(prop.graph);
      current_score = proposal_score;
      scorer.accept(current);
      ++accepted;
    }
    if (iter >= mcmc.burn_in && (iter - mcmc.burn_in) % mcmc.thin == 0) {
      const std::uint64_t h = current.hash();
      out.samples.push_back({iter, h, current.edge_count(), current_score, accept});
      out.graphs.try_emplace(h, current);
      for (const Edge& e : current.edges()) out.edge_freq(e.i, e.j) += 1.0;
    }
  }

  if (!out.samples.empty()) {
    out.edge_freq /= double(out.samples.size());
    out.edge_freq = (out.edge_freq + out.edge_freq.transpose()).eval();
  }
  out.acceptance_rate = mcmc.n_iter > 0 ? double(accepted) / double(mcmc.n_iter) : 0.0;
  out.wall_time_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  return out;
}

ChainResult run_chain(const SampleCov& scov, const PosteriorConfig& cfg, const McmcConfig& mcmc) {
  validate(cfg);
  PosteriorScorer scorer(scov, cfg, mcmc.verify_warm_start);
  ChainResult out = run_metropolis(scov.p(), scorer, mcmc);
  out.warm_start_max_diff = scorer.max_diff();
  return out;
}

Matrix edge_inclusion(const ChainResult& chain) {
  if (chain.samples.empty()) throw Error(Errc::empty_chain, "chain has no retained samples");
  Matrix freq = Matrix::Zero(chain.p, chain.p);
  for (const auto& s : chain.samples)
    for (const Edge& e : chain.graphs.at(s.graph_hash).edges()) {
      freq(e.i, e.j) += 1.0;
      freq(e.j, e.i) += 1.0;
    }
  return freq / double(chain.samples.size());
}

Graph median_probability_model(const Matrix& freq, double threshold) {
  if (freq.rows() != freq.cols()) throw Error(Errc::dimension_mismatch, "frequency matrix must be square");
  const int p = int(freq.rows());
  std::vector<Edge> edges;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (freq(i, j) > threshold) edges.push_back({i, j});
  return Graph(p, edges);
}

std::vector<double> degree_ranks(const std::vector<int>& degrees) {
  const std::size_t p = degrees.size();
  std::vector<std::size_t> idx(p);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return degrees[a] > degrees[b]; });
  std::vector<double> rank(p);
  for (std::size_t s = 0; s < p;) {
    std::size_t e = s;
    while (e < p && degrees[idx[e]] == degrees[idx[s]]) ++e;
    const double avg = 0.5 * (double(s + 1) + double(e));
    for (std::size_t k = s; k < e; ++k) rank[idx[k]] = avg;
    s = e;
  }
  return rank;
}

DegreePosterior degree_posterior(const ChainResult& chain) {
  if (chain.samples.empty()) throw Error(Errc::empty_chain, "chain has no retained samples");
  const int p = chain.p;
  DegreePosterior out;
  out.degree_prob = Matrix::Zero(p, p);
  out.rank_prob = Matrix::Zero(p, 2 * p - 1);
  out.mean_degree = Vector::Zero(p);
  out.mean_rank = Vector::Zero(p);
  const double w = 1.0 / double(chain.samples.size());
  for (const auto& s : chain.samples) {
    const auto deg = chain.graphs.at(s.graph_hash).degrees();
    const auto rank = degree_ranks(deg);
    for (int v = 0; v < p; ++v) {
      out.degree_prob(v, deg[std::size_t(v)]) += w;
      out.rank_prob(v, Eigen::Index(std::lround(2.0 * rank[std::size_t(v)] - 2.0))) += w;
      out.mean_degree(v) += w * deg[std::size_t(v)];
      out.mean_rank(v) += w * rank[std::size_t(v)];
    }
  }
  return out;
}

}  // namespace egw
