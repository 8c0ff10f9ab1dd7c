#pragma once

// Zero-sum sequences over C_d x C_d.
//
// A monomial prod z_{a,b}^{alpha_{a,b}} in the Fourier coordinates is
// translation invariant exactly when the multiset holding alpha_{a,b} copies
// of (a,b) sums to (0,0) mod d. Products of invariants correspond to unions
// of zero-sum multisets, so generator degrees are bounded by the Davenport
// constant D(C_d x C_d) = 2d - 1.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace invlayers::zerosum {

using Element = std::pair<int, int>;

class GroupSequence {
 public:
  GroupSequence() = default;
  explicit GroupSequence(int d);

  // Entries are reduced mod d.
  static GroupSequence from_elements(int d, const std::vector<Element>& elements);

  int d() const { return d_; }
  int degree() const { return degree_; }
  int multiplicity(int a, int b) const { return mult_[index(a, b)]; }
  const std::vector<int>& multiplicities() const { return mult_; }
  // Expanded, in (a, b) lexicographic order.
  std::vector<Element> elements() const;
  Element sum() const;

  void add(int a, int b, int count = 1);
  GroupSequence& operator+=(const GroupSequence& other);
  GroupSequence& operator-=(const GroupSequence& other);
  bool contains(const GroupSequence& other) const;

  friend bool operator==(const GroupSequence&, const GroupSequence&) = default;

 private:
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(d_) +
           static_cast<std::size_t>(b);
  }

  int d_ = 1;
  std::vector<int> mult_ = {0};
  int degree_ = 0;
};

bool is_zero_sum(const GroupSequence& s);

inline constexpr std::uint64_t kDefaultSearchBudget = 1'000'000;

// A nonempty zero-sum sub-multiset, or nullopt iff s is zero-sum free. When
// degree(s) >= 2d-1 the witness comes from the first 2d-1 elements and so has
// degree <= 2d-1.
std::optional<GroupSequence> find_zero_sum_subsequence(
    const GroupSequence& s, std::uint64_t budget = kDefaultSearchBudget);

// True iff s is zero-sum, nonempty, and no proper nonempty sub-multiset is.
bool is_indecomposable(const GroupSequence& s);

// (d-1) copies of (1,0) and (d-1) copies of (0,1).
GroupSequence classical_zero_sum_free_witness(int d);

struct DavenportResult {
  int d = 0;
  bool certified = false;
  // Least L forcing a nonempty zero-sum subsequence; 0 when not certified.
  int constant = 0;
  // Longest zero-sum-free length seen (= constant - 1 when certified).
  int max_zero_sum_free_length = 0;
  GroupSequence witness;
  // Every sequence of length <= this has been examined.
  int checked_up_to_length = 0;
  std::uint64_t nodes = 0;
};

inline constexpr int kDavenportMaxD = 4;
inline constexpr std::uint64_t kDefaultDavenportBudget = 20'000'000;

// Exhaustive level-by-level search over multisets of nonzero elements. Stops
// at the first length with no zero-sum-free sequence. `node_budget` bounds
// the total number of zero-sum-free multisets materialized; exhausting it
// returns an uncertified partial result.
DavenportResult davenport_constant(
    int d, std::uint64_t node_budget = kDefaultDavenportBudget);

// Factors a zero-sum s into zero-sum pieces of degree <= 2d-1 whose sum is s.
std::vector<GroupSequence> decompose_invariant_monomial(const GroupSequence& s);

struct TranslationDegreeCertificate {
  int degree = 0;
  std::optional<DavenportResult> davenport;
  // Zero-sum, degree `degree`, with no proper zero-sum part.
  GroupSequence indecomposable;
  bool indecomposable_verified = false;

  bool fully_certified() const {
    return davenport && davenport->certified &&
           davenport->constant == degree && indecomposable_verified;
  }
};

// 2d - 1, certified by the Davenport search when d <= kDavenportMaxD and by
// an explicit indecomposable invariant of that degree.
TranslationDegreeCertificate max_generator_degree_translation(
    int d, std::uint64_t node_budget = kDefaultDavenportBudget);

// [[a, b], ...] pairs.
nlohmann::json to_json(const GroupSequence& s);
GroupSequence sequence_from_json(int d, const nlohmann::json& pairs);

}  // namespace invlayers::zerosum
