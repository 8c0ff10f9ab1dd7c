#pragma once

// Counting and enumeration of set partitions and m-colored set partitions.
//
// A colored partition of the axes {0..k-1} is a set partition whose blocks
// each carry a node type in {0..m-1}. Grouping blocks by type recovers the
// axis split T_0 ⊔ ... ⊔ T_{m-1} and the per-type partitions gamma_j that
// index invariant tensor basis elements for S_{n_1} x ... x S_{n_m}.

#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace invlayers::combinat {

using BigInt = boost::multiprecision::cpp_int;

struct EnumerationCaps {
  int max_k = 8;
  int max_m = 8;
};

// Set partition of {0..k-1} stored as a restricted-growth string: rgs[0] = 0
// and rgs[i] <= 1 + max(rgs[0..i-1]). Blocks are therefore numbered by their
// minimum element.
class SetPartition {
 public:
  SetPartition() = default;

  static SetPartition from_rgs(std::vector<std::uint8_t> rgs);
  // Blocks may be listed in any order; each inner list may be unsorted.
  static SetPartition from_blocks(const std::vector<std::vector<int>>& blocks,
                                  int k);

  int k() const { return static_cast<int>(rgs_.size()); }
  int num_blocks() const { return num_blocks_; }
  int block_of(int axis) const { return rgs_[axis]; }
  const std::vector<std::uint8_t>& rgs() const { return rgs_; }
  std::vector<std::vector<int>> blocks() const;

  friend bool operator==(const SetPartition&, const SetPartition&) = default;

 private:
  std::vector<std::uint8_t> rgs_;
  int num_blocks_ = 0;
};

class ColoredPartition {
 public:
  ColoredPartition() = default;
  ColoredPartition(SetPartition partition, std::vector<int> block_types,
                   int num_types);

  // Builds from the per-type view: axis_types[s] in {0..m-1}, gammas[j] a
  // partition of the axes of type j listed in increasing order.
  static ColoredPartition from_typed(const std::vector<int>& axis_types,
                                     const std::vector<SetPartition>& gammas,
                                     int num_types);

  int k() const { return partition_.k(); }
  int num_types() const { return num_types_; }
  const SetPartition& partition() const { return partition_; }
  const std::vector<int>& block_types() const { return block_types_; }

  int axis_type(int axis) const {
    return block_types_[partition_.block_of(axis)];
  }
  std::vector<int> axis_types() const;
  // T_j, increasing.
  std::vector<int> axes_of_type(int type) const;
  // gamma_j, expressed over positions 0..|T_j|-1 of axes_of_type(j).
  SetPartition gamma(int type) const;
  int blocks_of_type(int type) const;

  friend bool operator==(const ColoredPartition&,
                         const ColoredPartition&) = default;

 private:
  SetPartition partition_;
  std::vector<int> block_types_;
  int num_types_ = 0;
};

BigInt stirling2(int k, int j);
BigInt bell(int k);
// Coefficient of x^k/k! in exp(m(e^x - 1)) = sum_j S(k,j) m^j.
BigInt gen_bell(int m, int k);

// b_k = sum over k_1+..+k_m = k of multinomial(k; k_1..k_m) a_{k_1}..a_{k_m},
// i.e. the EGF coefficients of f(x)^m. Output has the same length as `a`.
std::vector<BigInt> egf_power_coeffs(std::span<const BigInt> a, int m);

std::vector<SetPartition> enumerate_set_partitions(
    int k, const EnumerationCaps& caps = {});

// Order: set partitions in restricted-growth-string order, then block
// colorings lexicographically (block 0 most significant).
std::vector<ColoredPartition> enumerate_colored_partitions(
    int k, int m, const EnumerationCaps& caps = {});

}  // namespace invlayers::combinat
