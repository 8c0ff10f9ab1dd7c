#include "invlayers/graph.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <set>

#include "invlayers/errors.hpp"

namespace invlayers::graph {

Graph::Graph(int n) : n_(n), rows_(static_cast<std::size_t>(n), 0) {
  if (n < 0 || n > 64) throw ValidationError("graph size must be in 0..64");
}

void Graph::add_edge(int i, int j) {
  if (i == j) throw ValidationError("self-loops are not allowed");
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw ValidationError("vertex out of range");
  rows_[i] |= std::uint64_t{1} << j;
  rows_[j] |= std::uint64_t{1} << i;
}

int Graph::degree(int i) const { return std::popcount(rows_[i]); }

int Graph::edge_count() const {
  int total = 0;
  for (int i = 0; i < n_; ++i) total += degree(i);
  return total / 2;
}

Graph Graph::relabeled(const Permutation& p) const {
  if (p.n() != n_) throw ValidationError("relabeling size does not match graph");
  Graph out(n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (adjacent(i, j)) out.add_edge(static_cast<int>(p(i)), static_cast<int>(p(j)));
    }
  }
  return out;
}

Graph Graph::complement() const {
  Graph out(n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (!adjacent(i, j)) out.add_edge(i, j);
    }
  }
  return out;
}

Graph parse_graph6(std::string_view text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) throw ParseError("graph6: empty input", 0);
  auto byte = [&](std::size_t offset) {
    const int c = static_cast<unsigned char>(text[offset]);
    if (c < 63 || c > 126) {
      throw ParseError("graph6: byte " + std::to_string(c) + " at offset " +
                           std::to_string(offset) + " outside 63..126",
                       offset);
    }
    return c - 63;
  };
  if (text[0] == '~') {
    throw ParseError("graph6: only n <= 62 (short form) is supported", 0);
  }
  const int n = byte(0);
  Graph g(n);
  const std::size_t bits = static_cast<std::size_t>(n) * (n - (n > 0 ? 1 : 0)) / 2;
  const std::size_t expected = 1 + (bits + 5) / 6;
  if (text.size() != expected) {
    throw ParseError("graph6: expected " + std::to_string(expected) +
                         " bytes for n=" + std::to_string(n) + ", got " +
                         std::to_string(text.size()),
                     std::min(text.size(), expected));
  }
  std::size_t k = 0;
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i, ++k) {
      const int chunk = byte(1 + k / 6);
      if ((chunk >> (5 - k % 6)) & 1) g.add_edge(i, j);
    }
  }
  // Padding bits must be zero.
  for (; k % 6 != 0; ++k) {
    if ((byte(1 + k / 6) >> (5 - k % 6)) & 1) {
      throw ParseError("graph6: nonzero padding bit at offset " +
                           std::to_string(1 + k / 6),
                       1 + k / 6);
    }
  }
  return g;
}

std::string write_graph6(const Graph& g) {
  if (g.n() > kMaxGraph6Vertices) {
    throw ValidationError("graph6 short form supports n <= 62");
  }
  std::string out(1, static_cast<char>(g.n() + 63));
  int chunk = 0, filled = 0;
  for (int j = 1; j < g.n(); ++j) {
    for (int i = 0; i < j; ++i) {
      chunk = (chunk << 1) | (g.adjacent(i, j) ? 1 : 0);
      if (++filled == 6) {
        out.push_back(static_cast<char>(chunk + 63));
        chunk = filled = 0;
      }
    }
  }
  if (filled > 0) out.push_back(static_cast<char>((chunk << (6 - filled)) + 63));
  return out;
}

std::vector<int> refined_colors(const Graph& g) {
  const int n = g.n();
  std::vector<int> color(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) color[i] = g.degree(i);
  int classes = -1;
  while (true) {
    std::vector<std::pair<int, std::vector<int>>> signature(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      signature[i].first = color[i];
      for (int j = 0; j < n; ++j) {
        if (g.adjacent(i, j)) signature[i].second.push_back(color[j]);
      }
      std::sort(signature[i].second.begin(), signature[i].second.end());
    }
    std::map<std::pair<int, std::vector<int>>, int> rank;
    for (const auto& s : signature) rank.emplace(s, 0);
    int next = 0;
    for (auto& [key, value] : rank) value = next++;
    for (int i = 0; i < n; ++i) color[i] = rank.at(signature[i]);
    if (next == classes) break;
    classes = next;
  }
  return color;
}

namespace {

// Bits in graph6 order for the labeling where position p holds vertex order[p].
std::vector<bool> bit_string(const Graph& g, const std::vector<int>& order) {
  std::vector<bool> bits;
  const int n = g.n();
  bits.reserve(static_cast<std::size_t>(n) * n / 2);
  for (int j = 1; j < n; ++j) {
    for (int i = 0; i < j; ++i) bits.push_back(g.adjacent(order[i], order[j]));
  }
  return bits;
}

}  // namespace

Graph canonical_form(const Graph& g) {
  const int n = g.n();
  if (n <= 1) return g;
  const auto color = refined_colors(g);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return color[a] < color[b]; });
  // Class boundaries in `order`; permute within each class independently.
  std::vector<std::pair<int, int>> ranges;
  for (int start = 0; start < n;) {
    int end = start;
    while (end < n && color[order[end]] == color[order[start]]) ++end;
    ranges.emplace_back(start, end);
    start = end;
  }
  std::vector<bool> best = bit_string(g, order);
  std::vector<int> best_order = order;
  auto visit = [&](auto&& self, std::size_t r) -> void {
    if (r == ranges.size()) {
      auto bits = bit_string(g, order);
      if (bits < best) {
        best = std::move(bits);
        best_order = order;
      }
      return;
    }
    auto first = order.begin() + ranges[r].first;
    auto last = order.begin() + ranges[r].second;
    std::sort(first, last);
    do {
      self(self, r + 1);
    } while (std::next_permutation(first, last));
  };
  visit(visit, 0);
  // Vertex best_order[p] moves to position p.
  std::vector<std::uint32_t> image(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) image[best_order[p]] = static_cast<std::uint32_t>(p);
  return g.relabeled(Permutation(std::move(image)));
}

std::string canonical_graph6(const Graph& g) { return write_graph6(canonical_form(g)); }

std::vector<Graph> enumerate_graphs(int n) {
  if (n < 0) throw ValidationError("n must be >= 0");
  if (n > kMaxEnumerationVertices) {
    throw BudgetError("graph enumeration supports n <= " +
                      std::to_string(kMaxEnumerationVertices));
  }
  std::vector<Graph> level{Graph(0)};
  for (int size = 1; size <= n; ++size) {
    std::map<std::string, Graph> seen;
    for (const Graph& base : level) {
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (size - 1)); ++mask) {
        Graph g(size);
        for (int i = 0; i < size - 1; ++i) {
          for (int j = i + 1; j < size - 1; ++j) {
            if (base.adjacent(i, j)) g.add_edge(i, j);
          }
          if ((mask >> i) & 1u) g.add_edge(i, size - 1);
        }
        Graph c = canonical_form(g);
        seen.emplace(write_graph6(c), std::move(c));
      }
    }
    level.clear();
    for (auto& [key, graph] : seen) level.push_back(std::move(graph));
  }
  return level;
}

std::vector<Permutation> automorphism_group(const Graph& g, std::size_t cap) {
  const int n = g.n();
  const auto color = refined_colors(g);
  std::vector<Permutation> out;
  std::vector<int> image(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  auto extend = [&](auto&& self, int v) -> void {
    if (v == n) {
      if (out.size() >= cap) {
        throw BudgetError("automorphism group exceeds cap " + std::to_string(cap));
      }
      std::vector<std::uint32_t> img(image.begin(), image.end());
      out.emplace_back(std::move(img));
      return;
    }
    for (int w = 0; w < n; ++w) {
      if (used[w] || color[w] != color[v]) continue;
      bool ok = true;
      for (int u = 0; u < v && ok; ++u) {
        ok = g.adjacent(u, v) == g.adjacent(image[u], w);
      }
      if (!ok) continue;
      used[w] = true;
      image[v] = w;
      self(self, v + 1);
      used[w] = false;
    }
    image[v] = -1;
  };
  extend(extend, 0);
  // Backtracking visits w in increasing order, so the identity comes first.
  return out;
}

}  // namespace invlayers::graph
