#include <doctest.h>

#include <random>

#include "invlayers/exact_rank.hpp"

using namespace invlayers::linalg;

namespace {

using Dense = std::vector<std::vector<BigInt>>;

SparseRow<std::int64_t> sparse(const std::vector<std::int64_t>& dense) {
  SparseRow<std::int64_t> row;
  for (std::size_t c = 0; c < dense.size(); ++c) {
    if (dense[c] != 0) row.emplace_back(static_cast<std::uint32_t>(c), dense[c]);
  }
  return row;
}

// Random rows spanning a space of dimension at most `rank`.
std::vector<std::vector<std::int64_t>> low_rank(std::mt19937_64& rng, int rows, int cols,
                                                int rank) {
  std::uniform_int_distribution<std::int64_t> u(-3, 3);
  std::vector<std::vector<std::int64_t>> basis(static_cast<std::size_t>(rank),
                                               std::vector<std::int64_t>(cols));
  for (auto& r : basis) {
    for (auto& v : r) v = u(rng);
  }
  std::vector<std::vector<std::int64_t>> out;
  for (int i = 0; i < rows; ++i) {
    std::vector<std::int64_t> r(static_cast<std::size_t>(cols), 0);
    for (const auto& b : basis) {
      const auto c = u(rng);
      for (int j = 0; j < cols; ++j) r[j] += c * b[j];
    }
    out.push_back(r);
  }
  return out;
}

Dense to_dense(const std::vector<std::vector<std::int64_t>>& m) {
  Dense d;
  for (const auto& r : m) d.emplace_back(r.begin(), r.end());
  return d;
}

}  // namespace

TEST_CASE("bareiss rank") {
  CHECK(bareiss_rank({}) == 0);
  CHECK(bareiss_rank({{0, 0}, {0, 0}}) == 0);
  CHECK(bareiss_rank({{1, 2}, {2, 4}}) == 1);
  CHECK(bareiss_rank({{0, 1}, {1, 0}}) == 2);
  CHECK(bareiss_rank({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}) == 2);
  CHECK(bareiss_rank({{2, 0, 0}, {0, 3, 0}, {0, 0, 5}, {1, 1, 1}}) == 3);
}

TEST_CASE("echelon ranks agree with bareiss") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 9);
    const int cols = 1 + static_cast<int>(rng() % 9);
    const int rank = static_cast<int>(rng() % 6);
    const auto m = low_rank(rng, rows, cols, rank);
    const auto expected = bareiss_rank(to_dense(m));
    IntegerEchelon exact(static_cast<std::size_t>(cols));
    ModularEchelon mod(static_cast<std::size_t>(cols), kPrimeA);
    ModularEchelon mod_b(static_cast<std::size_t>(cols), kPrimeB);
    for (const auto& r : m) {
      const bool ind = exact.independent(sparse(r));
      CHECK(exact.add(sparse(r)) == ind);
      mod.add(sparse(r));
      mod_b.add(sparse(r));
    }
    CHECK(exact.rank() == expected);
    CHECK(mod.rank() == expected);
    CHECK(mod_b.rank() == expected);
  }
}

TEST_CASE("modular rank never exceeds the rational rank") {
  // det = p, so the matrix is singular mod p only.
  const std::int64_t p = 7;
  ModularEchelon mod(2, 7);
  mod.add(sparse({p, 0}));
  mod.add(sparse({0, 1}));
  CHECK(mod.rank() == 1);
  IntegerEchelon exact(2);
  exact.add(sparse({p, 0}));
  exact.add(sparse({0, 1}));
  CHECK(exact.rank() == 2);
}

TEST_CASE("large entries stay exact") {
  IntegerEchelon exact(3);
  const std::int64_t big = 1'000'000'007;
  CHECK(exact.add(sparse({big, big + 1, 1})));
  CHECK(exact.add(sparse({big + 1, big + 2, 1})));
  CHECK(!exact.add(sparse({big + 2, big + 3, 1})));
  CHECK(!exact.add(sparse({3, 3, 0})));
  CHECK(exact.rank() == 2);
}

TEST_CASE("column bounds") {
  IntegerEchelon exact(2);
  CHECK_THROWS(exact.add(sparse({0, 0, 1})));
  ModularEchelon mod(2, kPrimeA);
  CHECK_THROWS(mod.add(sparse({0, 0, 1})));
}
