#pragma once

// Permutation groups given by generators: typed symmetric groups, cyclic and
// translation groups, closure, orbits on points and on index tuples, and
// Burnside counting.

#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace invlayers::perm {

using BigInt = boost::multiprecision::cpp_int;

// Defaults; INVLAYERS_TUPLE_BUDGET and INVLAYERS_CLOSURE_CAP override them.
struct Budgets {
  std::uint64_t tuple_budget = 10'000'000;
  std::size_t closure_cap = 100'000;

  static Budgets from_env();
};

class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<std::uint32_t> image);

  static Permutation identity(int n);
  static Permutation from_one_based(const std::vector<int>& image);
  static Permutation transposition(int n, int a, int b);

  int n() const { return static_cast<int>(image_.size()); }
  std::uint32_t operator()(std::uint32_t i) const { return image_[i]; }
  const std::vector<std::uint32_t>& image() const { return image_; }
  std::vector<int> one_based() const;

  // (p * q)(i) = p(q(i)): q acts first.
  Permutation operator*(const Permutation& q) const;
  Permutation inverse() const;
  bool is_identity() const;
  int fixed_points() const;
  std::vector<int> cycle_lengths() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::uint32_t> image_;
};

struct PermGroupSpec {
  int n = 0;
  std::vector<Permutation> generators;
};

// n nodes split into m contiguous type blocks K_0, K_1, ... of the given sizes.
class TypedNodeSet {
 public:
  TypedNodeSet() = default;
  explicit TypedNodeSet(std::vector<int> type_sizes);

  // Nodes listed with arbitrary types 0..m-1. Returns the contiguous layout
  // and the relabeling sending each input node to its contiguous position.
  struct Relabeled;
  static Relabeled from_node_types(const std::vector<int>& node_types,
                                   int num_types);

  int n() const { return n_; }
  int m() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  int size_of(int type) const { return sizes_[type]; }
  int begin_of(int type) const { return offsets_[type]; }
  int type_of(int node) const { return node_type_[node]; }
  std::vector<int> block(int type) const;

  friend bool operator==(const TypedNodeSet& a, const TypedNodeSet& b) {
    return a.sizes_ == b.sizes_;
  }

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  std::vector<int> node_type_;
  int n_ = 0;
};

struct TypedNodeSet::Relabeled {
  TypedNodeSet nodes;
  Permutation relabel;
};

// Adjacent transpositions inside each block; generates S_{n_1} x ... x S_{n_m}.
PermGroupSpec young_generators(const TypedNodeSet& nodes);
// Single n-cycle i -> i+1 mod n.
PermGroupSpec cyclic_generators(int n);
// C_d x C_d on the d x d grid, point (i,j) flattened as i*d + j. Generators
// shift rows and columns by one.
PermGroupSpec translation_generators(int d);

// Every element, identity first, in breadth-first order over generator words.
std::vector<Permutation> group_closure(const PermGroupSpec& group,
                                       std::size_t cap);

// Orbits of the diagonal action on {0..n-1}^k, by union-find over the
// generator action.
std::uint64_t orbit_count_on_tuples(const PermGroupSpec& group, int k,
                                    std::uint64_t tuple_budget);

// (1/|G|) sum_g fix(g)^k over the closure.
BigInt burnside_count(const PermGroupSpec& group, int k, std::size_t cap);
BigInt burnside_count(std::span<const Permutation> elements, int k);

// Point orbits, each sorted, listed by smallest member.
std::vector<std::vector<int>> vertex_orbits(const PermGroupSpec& group);
int max_orbit_size(const PermGroupSpec& group);

}  // namespace invlayers::perm
