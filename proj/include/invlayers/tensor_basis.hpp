#pragma once

// Orthogonal indicator bases of S_{n_1} x ... x S_{n_m}-invariant k-tensor
// functionals, and their reading as equivariant maps between tensor spaces.
//
// A basis element is indexed by a ColoredPartition of the axes. Its support is
// every tuple (i_1..i_k) whose node types match the axis types and whose
// equality pattern is exactly the partition: i_s == i_t iff s and t share a
// block. Supports of distinct descriptors are disjoint and together cover
// {0..n-1}^k, so the family is orthogonal and spans the invariant subspace.
// A descriptor whose type-j blocks outnumber |K_j| has empty support; it is
// kept (flagged empty) so indexing does not depend on n.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "invlayers/combinat.hpp"
#include "invlayers/permgroup.hpp"

namespace invlayers::basis {

using combinat::ColoredPartition;
using perm::Permutation;
using perm::PermGroupSpec;
using perm::TypedNodeSet;

inline constexpr std::uint64_t kDefaultTupleBudget = 10'000'000;

// n^k, or BudgetError if it exceeds `budget`.
std::uint64_t index_space_size(int n, int k, std::uint64_t budget);

// 0/1 k-tensor over n nodes. Support tuples are kept as sorted row-major
// linear indices.
class SparseIndicatorTensor {
 public:
  SparseIndicatorTensor() = default;
  SparseIndicatorTensor(int n, int k, std::vector<std::uint64_t> linear_support);
  static SparseIndicatorTensor from_tuples(
      int n, int k, const std::vector<std::vector<int>>& tuples);

  int n() const { return n_; }
  int k() const { return k_; }
  std::size_t size() const { return support_.size(); }
  bool empty() const { return support_.empty(); }
  const std::vector<std::uint64_t>& support() const { return support_; }

  std::vector<int> tuple(std::size_t position) const;
  std::uint64_t linear_index(std::span<const int> tuple) const;
  bool contains(std::span<const int> tuple) const;

  // {(P(i_1)..P(i_k)) : tuple in support}.
  SparseIndicatorTensor permuted(const Permutation& p) const;

  friend bool operator==(const SparseIndicatorTensor&,
                         const SparseIndicatorTensor&) = default;

 private:
  int n_ = 0;
  int k_ = 0;
  std::vector<std::uint64_t> support_;
};

// Dense row-major k-tensor of reals.
struct DenseTensor {
  int n = 0;
  int k = 0;
  std::vector<double> data;

  static DenseTensor zeros(int n, int k,
                           std::uint64_t budget = kDefaultTupleBudget);
  double& operator[](std::uint64_t linear) { return data[linear]; }
  double operator[](std::uint64_t linear) const { return data[linear]; }
  // (P x)_{P(i_1)..P(i_k)} = x_{i_1..i_k}.
  DenseTensor permuted(const Permutation& p) const;
};

struct BasisElement {
  ColoredPartition descriptor;
  SparseIndicatorTensor tensor;

  bool empty() const { return tensor.empty(); }
};

struct TensorBasis {
  TypedNodeSet nodes;
  int order = 0;
  std::vector<BasisElement> elements;

  std::size_t nonempty_count() const;
};

BasisElement build_basis_element(const ColoredPartition& descriptor,
                                 const TypedNodeSet& nodes,
                                 std::uint64_t budget = kDefaultTupleBudget);

TensorBasis build_full_basis(int k, const TypedNodeSet& nodes,
                             std::uint64_t budget = kDefaultTupleBudget);

// Sum of x over the support.
double apply_functional(const BasisElement& element, const DenseTensor& x);

bool verify_invariance(const SparseIndicatorTensor& tensor,
                       const PermGroupSpec& group);

// Supports pairwise disjoint.
bool verify_orthogonality(const TensorBasis& basis);
// Union of supports equals {0..n-1}^k.
bool verify_covering(const TensorBasis& basis);

// Mean of x over each support (0 for empty elements). Reconstructing from
// these coefficients gives the orthogonal projection onto the invariant
// subspace, i.e. the group average of x.
std::vector<double> decompose(const DenseTensor& x, const TensorBasis& basis);
DenseTensor reconstruct(std::span<const double> coefficients,
                        const TensorBasis& basis);

// Equivariant maps R^{n^k} -> R^{n^d} as (k+d)-tensors: the first k axes
// index the input, the last d the output.
struct EquivariantBasis {
  int in_order = 0;
  int out_order = 0;
  TensorBasis basis;
};

EquivariantBasis equivariant_basis(int k, int d, const TypedNodeSet& nodes,
                                   std::uint64_t budget = kDefaultTupleBudget);

// y_{j..} = sum over support tuples (i.., j..) of x_{i..}.
DenseTensor apply_equivariant(const BasisElement& element, int in_order,
                              const DenseTensor& x);

// Line-oriented JSON: a header object on the first line, then one record per
// element. Indices and types are 1-based.
void serialize_basis(std::ostream& out, const TensorBasis& basis);
TensorBasis load_basis(std::istream& in,
                       std::uint64_t budget = kDefaultTupleBudget);

}  // namespace invlayers::basis
