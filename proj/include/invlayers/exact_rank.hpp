#pragma once

// Exact rank of sparse integer row systems, incrementally.
//
// ModularEchelon works over Z/p. Full column rank mod p implies full rank
// over Q, so a modular full-rank verdict is a proof; anything less must be
// confirmed with IntegerEchelon, which runs fraction-free elimination over
// the integers (rows kept primitive, no rationals ever formed).

#include <cstdint>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace invlayers::linalg {

using BigInt = boost::multiprecision::cpp_int;

template <typename T>
using SparseRow = std::vector<std::pair<std::uint32_t, T>>;  // sorted by column

inline constexpr std::uint64_t kPrimeA = 2147483647;  // 2^31 - 1
inline constexpr std::uint64_t kPrimeB = 1073741827;  // next prime after 2^30

class ModularEchelon {
 public:
  ModularEchelon(std::size_t cols, std::uint64_t prime);

  // Inserts the row; true iff it was independent of the rows so far.
  bool add(const SparseRow<std::int64_t>& row);
  bool independent(const SparseRow<std::int64_t>& row) const;
  std::size_t rank() const { return rows_.size(); }
  std::size_t cols() const { return pivot_.size(); }

 private:
  SparseRow<std::uint64_t> reduce(const SparseRow<std::int64_t>& row) const;

  std::uint64_t p_;
  std::vector<std::int32_t> pivot_;
  std::vector<SparseRow<std::uint64_t>> rows_;  // leading coefficient 1
};

class IntegerEchelon {
 public:
  explicit IntegerEchelon(std::size_t cols);

  bool add(const SparseRow<std::int64_t>& row);
  bool independent(const SparseRow<std::int64_t>& row) const;
  std::size_t rank() const { return rows_.size(); }
  std::size_t cols() const { return pivot_.size(); }

 private:
  SparseRow<BigInt> reduce(const SparseRow<std::int64_t>& row) const;

  std::vector<std::int32_t> pivot_;
  std::vector<SparseRow<BigInt>> rows_;  // primitive, positive leading entry
};

// Dense fraction-free (Bareiss) rank; the matrix is consumed.
std::size_t bareiss_rank(std::vector<std::vector<BigInt>> matrix);

}  // namespace invlayers::linalg
