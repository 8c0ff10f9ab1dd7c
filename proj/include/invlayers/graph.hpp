#pragma once

// Small simple undirected graphs: graph6 I/O, canonical forms, isomorphism
// class enumeration, and automorphism groups by refined backtracking.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "invlayers/permgroup.hpp"

namespace invlayers::graph {

using perm::Permutation;

inline constexpr int kMaxGraph6Vertices = 62;

class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);

  int n() const { return n_; }
  bool adjacent(int i, int j) const { return (rows_[i] >> j) & 1u; }
  void add_edge(int i, int j);
  std::uint64_t row(int i) const { return rows_[i]; }
  int degree(int i) const;
  int edge_count() const;

  // g.relabeled(p) has edge (p(i), p(j)) for every edge (i, j).
  Graph relabeled(const Permutation& p) const;
  Graph complement() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> rows_;
};

// Short-form graph6 (n <= 62). Errors carry the byte offset.
Graph parse_graph6(std::string_view text);
std::string write_graph6(const Graph& g);

// Iterated degree refinement: an isomorphism-invariant vertex coloring
// (colors 0..c-1, ordered by signature).
std::vector<int> refined_colors(const Graph& g);

// Relabeling that minimizes the graph6 adjacency bit string among all
// labelings that list color classes in increasing color order.
Graph canonical_form(const Graph& g);
std::string canonical_graph6(const Graph& g);

// One representative per isomorphism class, in canonical form, sorted by
// canonical graph6 string. Built by vertex augmentation from n-1.
std::vector<Graph> enumerate_graphs(int n);
inline constexpr int kMaxEnumerationVertices = 7;

// Every adjacency-preserving permutation, identity first. Throws BudgetError
// past `cap` elements.
std::vector<Permutation> automorphism_group(const Graph& g,
                                            std::size_t cap = 100'000);

}  // namespace invlayers::graph
