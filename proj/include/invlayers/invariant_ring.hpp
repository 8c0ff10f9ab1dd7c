#pragma once

// Degrees of minimal generators of R[x_1..x_n]^G for permutation groups G,
// and the per-graph checks of the tensor-size bounds T(G) <= n and
// T(G) <= max |Aut G orbit| against that generator-degree proxy.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json_fwd.hpp>

#include "invlayers/graph.hpp"
#include "invlayers/permgroup.hpp"

namespace invlayers::invring {

using BigInt = boost::multiprecision::cpp_int;
using perm::Permutation;

using ExponentVector = std::vector<int>;

inline constexpr std::uint64_t kDefaultMonomialBudget = 2'000'000;

struct MonomialIndex;

// Monomials of one degree in n variables and their orbits under a group
// given by its full element list.
class MonomialOrbits {
 public:
  MonomialOrbits(std::span<const Permutation> elements, int n, int degree,
                 std::uint64_t budget = kDefaultMonomialBudget);

  int n() const { return n_; }
  int degree() const { return degree_; }
  std::size_t monomial_count() const { return monomials_.size(); }
  std::size_t orbit_count() const { return orbit_members_.size(); }
  const ExponentVector& monomial(std::size_t i) const { return monomials_[i]; }
  // Index of a monomial of this degree.
  std::size_t index_of(std::span<const int> exps) const;
  std::size_t orbit_of(std::size_t monomial) const { return orbit_of_[monomial]; }
  // Members of orbit o as monomial indices; the first is the orbit's smallest
  // index, used as representative.
  const std::vector<std::uint32_t>& members(std::size_t orbit) const {
    return orbit_members_[orbit];
  }
  std::size_t representative(std::size_t orbit) const { return orbit_members_[orbit].front(); }

 private:
  int n_;
  int degree_;
  std::vector<ExponentVector> monomials_;
  std::vector<std::uint32_t> orbit_of_;
  std::vector<std::vector<std::uint32_t>> orbit_members_;
  std::shared_ptr<const MonomialIndex> index_;
};

// C(n+d-1, d) or BudgetError.
std::uint64_t monomial_count(int n, int degree, std::uint64_t budget);

std::uint64_t invariant_dim_by_degree(std::span<const Permutation> elements,
                                      int n, int degree,
                                      std::uint64_t budget = kDefaultMonomialBudget);

// Orbit sums as lists of exponent vectors; together a basis of the degree-d
// invariants.
std::vector<std::vector<ExponentVector>> monomial_orbit_sums(
    std::span<const Permutation> elements, int n, int degree,
    std::uint64_t budget = kDefaultMonomialBudget);

// Hilbert series coefficients 0..max_degree of the invariant ring from cycle
// types: (1/|G|) sum_g prod_{cycles} 1/(1 - t^len).
std::vector<BigInt> molien_hilbert_coeffs(std::span<const Permutation> elements,
                                          int n, int max_degree);

enum class Arithmetic {
  kExact,     // fraction-free integer elimination everywhere
  kModular,   // mod-p elimination; full rank is final, deficits redone exactly
};

struct GeneratorOptions {
  Arithmetic arithmetic = Arithmetic::kModular;
  std::uint64_t monomial_budget = kDefaultMonomialBudget;
};

struct Generator {
  int degree = 0;
  ExponentVector representative;  // orbit sum of this monomial
};

struct GeneratorDegrees {
  int n = 0;
  int degree_cap = 0;
  // new_count[d] for d = 0..verified_up_to (index 0 unused, always 0).
  std::vector<int> new_count;
  int verified_up_to = 0;
  std::vector<Generator> generators;

  // Largest degree with a new generator, 0 if none.
  int max_degree() const;
  // (degree, count) for degrees with count > 0.
  std::vector<std::pair<int, int>> nonzero() const;
};

// For d = 1..degree_cap: new(d) = dim_d - rank of products f * O with f a
// previously selected generator of degree a < d and O a degree-(d-a) orbit
// sum. These span every product of two positive-degree invariants. New
// generators are orbit sums completing a basis. Stops early with
// verified_up_to = d-1 when degree d exceeds the monomial budget.
GeneratorDegrees generator_degrees(std::span<const Permutation> elements, int n,
                                   int degree_cap,
                                   const GeneratorOptions& options = {});

enum class Verdict { kHolds, kViolated, kVerifiedUpToCap };
std::string to_string(Verdict v);

struct CapPolicy {
  enum class Kind { kFull, kTwoN, kFixed } kind = Kind::kTwoN;
  int fixed = 0;

  static CapPolicy parse(const std::string& text);
  std::string describe() const;
};

// max(n, n(n-1)/2): no generator of a permutation group on n letters exceeds
// this degree, so checking up to it certifies the answer.
int full_degree_bound(int n);
int degree_cap_for(int n, const CapPolicy& policy);

struct ConjectureReport {
  std::string graph6;
  int n = 0;
  std::size_t aut_order = 0;
  std::vector<int> orbit_sizes;
  int max_orbit = 0;
  std::vector<std::pair<int, int>> generator_degrees;  // (degree, count)
  int degree_cap = 0;
  int full_bound = 0;
  int verified_up_to = 0;
  int beta_proxy = 0;
  Verdict a_holds = Verdict::kVerifiedUpToCap;
  Verdict b_holds = Verdict::kVerifiedUpToCap;

  bool counterexample() const {
    return a_holds == Verdict::kViolated || b_holds == Verdict::kViolated;
  }
};

ConjectureReport check_conjectures(const graph::Graph& g,
                                   const CapPolicy& policy,
                                   const GeneratorOptions& options = {});

struct SweepSummaryRow {
  int n = 0;
  int graphs = 0;
  int a_true = 0, a_false = 0, a_capped = 0;
  int b_true = 0, b_false = 0, b_capped = 0;
};

struct SweepResult {
  std::vector<ConjectureReport> reports;  // sorted by canonical graph6
  std::vector<SweepSummaryRow> summary;   // one row per n
  bool any_counterexample() const;
};

SweepResult sweep(int n_max, const CapPolicy& policy, int jobs = 1,
                  const GeneratorOptions& options = {});
SweepResult sweep_graphs(const std::vector<graph::Graph>& graphs,
                         const CapPolicy& policy, int jobs = 1,
                         const GeneratorOptions& options = {});

// CSV header: graph6,n,aut_order,max_orbit,generator_degrees,beta_proxy,
// verified_up_to,full_bound,A,B. Degrees are written as degree:count;...
void write_reports_csv(std::ostream& out, const std::vector<ConjectureReport>& reports);
void write_summary_csv(std::ostream& out, const std::vector<SweepSummaryRow>& rows);
nlohmann::json to_json(const ConjectureReport& r);

}  // namespace invlayers::invring
