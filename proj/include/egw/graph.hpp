#pragma once

#include "egw/core.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace egw {

struct Edge {
  int i = 0;
  int j = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph on vertices 0..p-1. Edges live in a packed
/// upper-triangle mask, so enumeration is always lexicographic.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int p);
  Graph(int p, std::span<const Edge> edges);

  static Graph complete(int p);

  int p() const noexcept { return p_; }
  std::size_t edge_count() const noexcept { return n_edges_; }
  std::size_t max_edges() const noexcept { return mask_.size(); }
  std::size_t free_parameter_count() const noexcept { return std::size_t(p_) + n_edges_; }

  bool has_edge(int i, int j) const;
  std::vector<Edge> edges() const;
  std::vector<int> neighbors(int v) const;
  std::vector<int> degrees() const;

  /// Position of pair (i, j), i < j, in the packed upper triangle.
  std::size_t pair_index(int i, int j) const;
  Edge pair_at(std::size_t k) const;

  /// FNV-1a over p and the edge mask.
  std::uint64_t hash() const noexcept;
  std::string hash_hex() const;

  Graph induced(std::span<const int> vertices) const;

  friend bool operator==(const Graph& a, const Graph& b) noexcept {
    return a.p_ == b.p_ && a.mask_ == b.mask_;
  }

 private:
  friend Graph flip_edge(const Graph& g, int i, int j);
  void check_pair(int i, int j) const;
  void set(int i, int j, bool on);

  int p_ = 0;
  std::size_t n_edges_ = 0;
  std::vector<std::uint8_t> mask_;
};

/// Copy of g with pair (i, j) toggled. Throws invalid_pair unless 0 <= i < j < p.
Graph flip_edge(const Graph& g, int i, int j);

Graph path_graph(int p);
/// Edges |i - j| <= bandwidth.
Graph band_graph(int p, int bandwidth);
Graph star_graph(int p, int hub = 0);
Graph cycle_graph(int p);

/// Free coordinates of a matrix in P_G: the p diagonal positions first, then
/// the edges in lexicographic order.
class ParamIndex {
 public:
  explicit ParamIndex(const Graph& g);

  std::size_t size() const noexcept { return positions_.size(); }
  Edge position(std::size_t k) const { return positions_.at(k); }
  const std::vector<Edge>& positions() const noexcept { return positions_; }
  std::optional<std::size_t> index_of(int i, int j) const;

 private:
  int p_;
  std::vector<Edge> positions_;
  std::vector<std::int64_t> lookup_;
};

struct EliminationResult {
  bool decomposable = false;
  /// Perfect elimination ordering (first entry eliminated first); empty when
  /// the graph is not decomposable.
  std::vector<int> order;
};

/// Maximum cardinality search with lowest-index tie breaking.
std::vector<int> maximum_cardinality_search(const Graph& g);

/// True when each vertex's neighbours that come later in `order` form a clique.
bool is_perfect_elimination_order(const Graph& g, std::span<const int> order);

EliminationResult is_decomposable(const Graph& g);

struct CliqueTree {
  std::vector<std::vector<int>> cliques;
  /// separators[k] = cliques[k + 1] ∩ (cliques[0] ∪ ... ∪ cliques[k]); may be empty.
  std::vector<std::vector<int>> separators;
};

CliqueTree clique_decomposition(const Graph& g);

}  // namespace egw

template <>
struct std::hash<egw::Graph> {
  std::size_t operator()(const egw::Graph& g) const noexcept { return g.hash(); }
};
