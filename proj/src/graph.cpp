#include "egw/graph.hpp"

#include <algorithm>
#include <cstdio>

namespace egw {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::invalid_pair: return "InvalidPair";
    case Errc::not_pd: return "NotPD";
    case Errc::not_decomposable: return "NotDecomposable";
    case Errc::support_violation: return "SupportViolation";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::empty_chain: return "EmptyChain";
    case Errc::degenerate_draw: return "DegenerateDraw";
    case Errc::seed_required: return "SeedRequired";
    case Errc::io: return "IOError";
    case Errc::parse: return "ParseError";
  }
  return "Error";
}

Graph::Graph(int p) : p_(p) {
  if (p < 1) throw Error(Errc::invalid_argument, "graph needs at least one vertex");
  mask_.assign(std::size_t(p) * std::size_t(p - 1) / 2, 0);
}

Graph::Graph(int p, std::span<const Edge> edges) : Graph(p) {
  for (const Edge& e : edges) {
    const int i = std::min(e.i, e.j);
    const int j = std::max(e.i, e.j);
    check_pair(i, j);
    set(i, j, true);
  }
}

Graph Graph::complete(int p) {
  Graph g(p);
  std::fill(g.mask_.begin(), g.mask_.end(), std::uint8_t{1});
  g.n_edges_ = g.mask_.size();
  return g;
}

void Graph::check_pair(int i, int j) const {
  if (i < 0 || i >= j || j >= p_) {
    throw Error(Errc::invalid_pair, "pair (" + std::to_string(i) + "," + std::to_string(j) +
                                        ") is not a valid i<j<p position");
  }
}

std::size_t Graph::pair_index(int i, int j) const {
  // rows 0..i-1 contribute (p-1) + (p-2) + ... + (p-i) entries
  const std::size_t row_start = std::size_t(i) * (2 * std::size_t(p_) - std::size_t(i) - 1) / 2;
  return row_start + std::size_t(j - i - 1);
}

Edge Graph::pair_at(std::size_t k) const {
  int i = 0;
  std::size_t row_len = std::size_t(p_ - 1);
  while (k >= row_len) {
    k -= row_len;
    ++i;
    --row_len;
  }
  return {i, i + 1 + int(k)};
}

void Graph::set(int i, int j, bool on) {
  auto& bit = mask_[pair_index(i, j)];
  if (bool(bit) == on) return;
  bit = on ? 1 : 0;
  n_edges_ = on ? n_edges_ + 1 : n_edges_ - 1;
}

bool Graph::has_edge(int i, int j) const {
  if (i == j) return false;
  if (i > j) std::swap(i, j);
  check_pair(i, j);
  return mask_[pair_index(i, j)] != 0;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(n_edges_);
  std::size_t k = 0;
  for (int i = 0; i < p_; ++i)
    for (int j = i + 1; j < p_; ++j, ++k)
      if (mask_[k]) out.push_back({i, j});
  return out;
}

std::vector<int> Graph::neighbors(int v) const {
  std::vector<int> out;
  for (int u = 0; u < p_; ++u)
    if (u != v && has_edge(u, v)) out.push_back(u);
  return out;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(std::size_t(p_), 0);
  std::size_t k = 0;
  for (int i = 0; i < p_; ++i)
    for (int j = i + 1; j < p_; ++j, ++k)
      if (mask_[k]) {
        ++deg[std::size_t(i)];
        ++deg[std::size_t(j)];
      }
  return deg;
}

std::uint64_t Graph::hash() const noexcept {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (int s = 0; s < 4; ++s) mix(std::uint8_t((unsigned(p_) >> (8 * s)) & 0xffu));
  for (std::uint8_t b : mask_) mix(b);
  return h;
}

std::string Graph::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

Graph Graph::induced(std::span<const int> vertices) const {
  Graph sub(int(vertices.size()));
  for (std::size_t a = 0; a < vertices.size(); ++a)
    for (std::size_t b = a + 1; b < vertices.size(); ++b)
      if (has_edge(vertices[a], vertices[b])) sub.set(int(a), int(b), true);
  return sub;
}

Graph flip_edge(const Graph& g, int i, int j) {
  g.check_pair(i, j);
  Graph out = g;
  out.set(i, j, !g.has_edge(i, j));
  return out;
}

Graph path_graph(int p) { return band_graph(p, 1); }

Graph band_graph(int p, int bandwidth) {
  std::vector<Edge> edges;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p && j - i <= bandwidth; ++j) edges.push_back({i, j});
  return Graph(p, edges);
}

Graph star_graph(int p, int hub) {
  std::vector<Edge> edges;
  for (int v = 0; v < p; ++v)
    if (v != hub) edges.push_back({std::min(v, hub), std::max(v, hub)});
  return Graph(p, edges);
}

Graph cycle_graph(int p) {
  Graph g = path_graph(p);
  if (p >= 3) g = flip_edge(g, 0, p - 1);
  return g;
}

ParamIndex::ParamIndex(const Graph& g) : p_(g.p()) {
  positions_.reserve(g.free_parameter_count());
  for (int i = 0; i < p_; ++i) positions_.push_back({i, i});
  for (const Edge& e : g.edges()) positions_.push_back(e);
  lookup_.assign(std::size_t(p_) * std::size_t(p_), -1);
  for (std::size_t k = 0; k < positions_.size(); ++k) {
    const auto [i, j] = positions_[k];
    lookup_[std::size_t(i) * std::size_t(p_) + std::size_t(j)] = std::int64_t(k);
    lookup_[std::size_t(j) * std::size_t(p_) + std::size_t(i)] = std::int64_t(k);
  }
}

std::optional<std::size_t> ParamIndex::index_of(int i, int j) const {
  if (i < 0 || j < 0 || i >= p_ || j >= p_) return std::nullopt;
  const auto k = lookup_[std::size_t(i) * std::size_t(p_) + std::size_t(j)];
  if (k < 0) return std::nullopt;
  return std::size_t(k);
}

std::vector<int> maximum_cardinality_search(const Graph& g) {
  const int p = g.p();
  std::vector<int> weight(std::size_t(p), 0);
  std::vector<bool> visited(std::size_t(p), false);
  std::vector<int> visit;
  visit.reserve(std::size_t(p));
  for (int step = 0; step < p; ++step) {
    int best = -1;
    for (int v = 0; v < p; ++v)
      if (!visited[std::size_t(v)] && (best < 0 || weight[std::size_t(v)] > weight[std::size_t(best)]))
        best = v;
    visited[std::size_t(best)] = true;
    visit.push_back(best);
    for (int u = 0; u < p; ++u)
      if (!visited[std::size_t(u)] && g.has_edge(u, best)) ++weight[std::size_t(u)];
  }
  return visit;
}

bool is_perfect_elimination_order(const Graph& g, std::span<const int> order) {
  const int p = g.p();
  if (int(order.size()) != p) return false;
  std::vector<int> pos(std::size_t(p), -1);
  for (int k = 0; k < p; ++k) {
    const int v = order[std::size_t(k)];
    if (v < 0 || v >= p || pos[std::size_t(v)] >= 0) return false;
    pos[std::size_t(v)] = k;
  }
  for (int v = 0; v < p; ++v) {
    std::vector<int> later;
    for (int u : g.neighbors(v))
      if (pos[std::size_t(u)] > pos[std::size_t(v)]) later.push_back(u);
    for (std::size_t a = 0; a < later.size(); ++a)
      for (std::size_t b = a + 1; b < later.size(); ++b)
        if (!g.has_edge(later[a], later[b])) return false;
  }
  return true;
}

EliminationResult is_decomposable(const Graph& g) {
  auto order = maximum_cardinality_search(g);
  std::reverse(order.begin(), order.end());
  if (!is_perfect_elimination_order(g, order)) return {false, {}};
  return {true, std::move(order)};
}

CliqueTree clique_decomposition(const Graph& g) {
  const int p = g.p();
  const auto visit = maximum_cardinality_search(g);
  std::vector<int> pos(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) pos[std::size_t(visit[std::size_t(k)])] = k;

  if (!is_perfect_elimination_order(g, std::vector<int>(visit.rbegin(), visit.rend())))
    throw Error(Errc::not_decomposable, "graph has no perfect elimination ordering");

  // Candidate clique of v: v plus its neighbours visited before it. Maximal
  // candidates ordered by visit position satisfy running intersection.
  std::vector<std::vector<int>> candidates;
  candidates.reserve(std::size_t(p));
  for (int v : visit) {
    std::vector<int> c{v};
    for (int u : g.neighbors(v))
      if (pos[std::size_t(u)] < pos[std::size_t(v)]) c.push_back(u);
    std::sort(c.begin(), c.end());
    candidates.push_back(std::move(c));
  }

  CliqueTree tree;
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    bool maximal = true;
    for (std::size_t b = 0; b < candidates.size() && maximal; ++b) {
      if (a == b || candidates[b].size() <= candidates[a].size()) continue;
      maximal = !std::includes(candidates[b].begin(), candidates[b].end(), candidates[a].begin(),
                               candidates[a].end());
    }
    if (maximal) tree.cliques.push_back(candidates[a]);
  }

  std::vector<bool> seen(std::size_t(p), false);
  for (std::size_t k = 0; k < tree.cliques.size(); ++k) {
    if (k > 0) {
      std::vector<int> sep;
      for (int v : tree.cliques[k])
        if (seen[std::size_t(v)]) sep.push_back(v);
      tree.separators.push_back(std::move(sep));
    }
    for (int v : tree.cliques[k]) seen[std::size_t(v)] = true;
  }
  return tree;
}

}  // namespace egw
