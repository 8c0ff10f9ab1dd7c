#include "invlayers/exact_rank.hpp"

#include <stdexcept>

#include "invlayers/errors.hpp"

namespace invlayers::linalg {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
  std::uint64_t result = 1;
  base %= p;
  while (exp > 0) {
    if (exp & 1u) result = mul_mod(result, base, p);
    base = mul_mod(base, base, p);
    exp >>= 1u;
  }
  return result;
}

template <typename T>
void check_columns(const SparseRow<T>& row, std::size_t cols) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i].first >= cols || (i > 0 && row[i - 1].first >= row[i].first)) {
      throw ValidationError("sparse row columns must be increasing and in range");
    }
  }
}

}  // namespace

ModularEchelon::ModularEchelon(std::size_t cols, std::uint64_t prime)
    : p_(prime), pivot_(cols, -1) {}

SparseRow<std::uint64_t> ModularEchelon::reduce(
    const SparseRow<std::int64_t>& input) const {
  check_columns(input, pivot_.size());
  SparseRow<std::uint64_t> row;
  row.reserve(input.size());
  for (const auto& [c, v] : input) {
    const auto r = static_cast<std::uint64_t>(((v % static_cast<std::int64_t>(p_)) +
                                               static_cast<std::int64_t>(p_)) %
                                              static_cast<std::int64_t>(p_));
    if (r != 0) row.emplace_back(c, r);
  }
  SparseRow<std::uint64_t> scratch;
  std::size_t start = 0;
  while (start < row.size()) {
    const auto lead = row[start].first;
    const int r = pivot_[lead];
    if (r < 0) {
      ++start;
      continue;
    }
    // row -= row[lead] * pivot_row, only touching columns >= lead.
    const std::uint64_t factor = p_ - row[start].second;
    const auto& piv = rows_[static_cast<std::size_t>(r)];
    scratch.clear();
    scratch.insert(scratch.end(), row.begin(), row.begin() + static_cast<std::ptrdiff_t>(start));
    std::size_t i = start, j = 0;
    while (i < row.size() || j < piv.size()) {
      if (j == piv.size() || (i < row.size() && row[i].first < piv[j].first)) {
        scratch.push_back(row[i++]);
      } else if (i == row.size() || piv[j].first < row[i].first) {
        scratch.emplace_back(piv[j].first, mul_mod(factor, piv[j].second, p_));
        ++j;
      } else {
        const auto v = (row[i].second + mul_mod(factor, piv[j].second, p_)) % p_;
        if (v != 0) scratch.emplace_back(row[i].first, v);
        ++i;
        ++j;
      }
    }
    row.swap(scratch);
  }
  return row;
}

bool ModularEchelon::independent(const SparseRow<std::int64_t>& row) const {
  const auto reduced = reduce(row);
  for (const auto& e : reduced) {
    if (pivot_[e.first] < 0) return true;
  }
  return false;
}

bool ModularEchelon::add(const SparseRow<std::int64_t>& input) {
  auto row = reduce(input);
  // After reduction every surviving entry before the first free column has
  // been cleared, so the first entry is a free column (or the row is zero).
  std::size_t first = 0;
  while (first < row.size() && pivot_[row[first].first] >= 0) ++first;
  if (first == row.size()) return false;
  if (first != 0) throw std::logic_error("modular reduction left a pivot column");
  const std::uint64_t inv = pow_mod(row.front().second, p_ - 2, p_);
  for (auto& e : row) e.second = mul_mod(e.second, inv, p_);
  pivot_[row.front().first] = static_cast<std::int32_t>(rows_.size());
  rows_.push_back(std::move(row));
  return true;
}

IntegerEchelon::IntegerEchelon(std::size_t cols) : pivot_(cols, -1) {}

namespace {

void make_primitive(SparseRow<BigInt>& row) {
  if (row.empty()) return;
  BigInt g = 0;
  for (const auto& e : row) {
    g = boost::multiprecision::gcd(g, e.second);
    if (g == 1) break;
  }
  if (row.front().second < 0) g = -g;
  if (g != 1) {
    for (auto& e : row) e.second /= g;
  }
}

}  // namespace

SparseRow<BigInt> IntegerEchelon::reduce(
    const SparseRow<std::int64_t>& input) const {
  check_columns(input, pivot_.size());
  SparseRow<BigInt> row;
  for (const auto& [c, v] : input) {
    if (v != 0) row.emplace_back(c, BigInt(v));
  }
  SparseRow<BigInt> scratch;
  std::size_t start = 0;
  while (start < row.size()) {
    const int r = pivot_[row[start].first];
    if (r < 0) {
      ++start;
      continue;
    }
    // row <- piv_lead * row - row_lead * pivot_row. Entries before `start`
    // sit in free columns and are scaled too.
    const auto& piv = rows_[static_cast<std::size_t>(r)];
    const BigInt a = piv.front().second;
    const BigInt b = row[start].second;
    scratch.clear();
    for (std::size_t i = 0; i < start; ++i) scratch.emplace_back(row[i].first, a * row[i].second);
    std::size_t i = start, j = 0;
    while (i < row.size() || j < piv.size()) {
      if (j == piv.size() || (i < row.size() && row[i].first < piv[j].first)) {
        scratch.emplace_back(row[i].first, a * row[i].second);
        ++i;
      } else if (i == row.size() || piv[j].first < row[i].first) {
        scratch.emplace_back(piv[j].first, -b * piv[j].second);
        ++j;
      } else {
        BigInt v = a * row[i].second - b * piv[j].second;
        if (v != 0) scratch.emplace_back(row[i].first, std::move(v));
        ++i;
        ++j;
      }
    }
    row.swap(scratch);
    make_primitive(row);
  }
  return row;
}

bool IntegerEchelon::independent(const SparseRow<std::int64_t>& row) const {
  return !reduce(row).empty();
}

bool IntegerEchelon::add(const SparseRow<std::int64_t>& input) {
  auto row = reduce(input);
  if (row.empty()) return false;
  make_primitive(row);
  pivot_[row.front().first] = static_cast<std::int32_t>(rows_.size());
  rows_.push_back(std::move(row));
  return true;
}

std::size_t bareiss_rank(std::vector<std::vector<BigInt>> a) {
  const std::size_t rows = a.size();
  if (rows == 0) return 0;
  const std::size_t cols = a.front().size();
  std::size_t rank = 0;
  BigInt prev = 1;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      for (std::size_t k = c + 1; k < cols; ++k) {
        BigInt num = a[rank][c] * a[r][k] - a[r][c] * a[rank][k];
        if (num % prev != 0) throw std::logic_error("Bareiss step not exact");
        a[r][k] = num / prev;
      }
      a[r][c] = 0;
    }
    prev = a[rank][c];
    ++rank;
  }
  return rank;
}

}  // namespace invlayers::linalg
