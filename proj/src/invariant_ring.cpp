#include "invlayers/invariant_ring.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <ostream>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "invlayers/errors.hpp"
#include "invlayers/exact_rank.hpp"

namespace invlayers::invring {

namespace {

constexpr int kMaxVariables = 10;
constexpr int kMaxDegree = 63;
constexpr int kBitsPerExponent = 6;

std::uint64_t pack(std::span<const int> exps) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    key |= static_cast<std::uint64_t>(exps[i]) << (kBitsPerExponent * i);
  }
  return key;
}

}  // namespace

std::uint64_t monomial_count(int n, int degree, std::uint64_t budget) {
  if (n < 0 || degree < 0) throw ValidationError("n and degree must be >= 0");
  if (n == 0) return degree == 0 ? 1 : 0;
  // C(n-1+d, n-1), built incrementally and checked against the budget.
  std::uint64_t c = 1;
  for (int i = 1; i <= n - 1; ++i) {
    c = c * static_cast<std::uint64_t>(degree + i) / static_cast<std::uint64_t>(i);
    if (c > budget) {
      throw BudgetError("degree " + std::to_string(degree) + " in " + std::to_string(n) +
                        " variables exceeds monomial budget " + std::to_string(budget));
    }
  }
  if (c > budget) {
    throw BudgetError("degree " + std::to_string(degree) + " exceeds monomial budget " +
                      std::to_string(budget));
  }
  return c;
}

struct MonomialIndex {
  std::unordered_map<std::uint64_t, std::uint32_t> map;
};

MonomialOrbits::MonomialOrbits(std::span<const Permutation> elements, int n,
                               int degree, std::uint64_t budget)
    : n_(n), degree_(degree) {
  if (n < 1 || n > kMaxVariables) {
    throw ValidationError("monomial orbits support 1.." + std::to_string(kMaxVariables) +
                          " variables");
  }
  if (degree < 0 || degree > kMaxDegree) {
    throw ValidationError("degree must be in 0.." + std::to_string(kMaxDegree));
  }
  for (const auto& g : elements) {
    if (g.n() != n) throw ValidationError("group element does not act on n variables");
  }
  const auto count = invring::monomial_count(n, degree, budget);
  monomials_.reserve(count);
  // Lexicographically decreasing exponent vectors: x_1^d first.
  ExponentVector e(static_cast<std::size_t>(n), 0);
  auto fill = [&](auto&& self, int var, int left) -> void {
    if (var == n - 1) {
      e[var] = left;
      monomials_.push_back(e);
      return;
    }
    for (int v = left; v >= 0; --v) {
      e[var] = v;
      self(self, var + 1, left - v);
    }
  };
  fill(fill, 0, degree);

  std::unordered_map<std::uint64_t, std::uint32_t> index;
  index.reserve(monomials_.size() * 2);
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    index.emplace(pack(monomials_[i]), static_cast<std::uint32_t>(i));
  }
  constexpr std::uint32_t kUnset = UINT32_MAX;
  orbit_of_.assign(monomials_.size(), kUnset);
  ExponentVector image(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    if (orbit_of_[i] != kUnset) continue;
    const auto orbit = static_cast<std::uint32_t>(orbit_members_.size());
    std::vector<std::uint32_t> members{static_cast<std::uint32_t>(i)};
    orbit_of_[i] = orbit;
    for (const auto& g : elements) {
      for (int v = 0; v < n; ++v) image[g(static_cast<std::uint32_t>(v))] = monomials_[i][v];
      const std::uint32_t j = index.at(pack(image));
      if (orbit_of_[j] == kUnset) {
        orbit_of_[j] = orbit;
        members.push_back(j);
      }
    }
    std::sort(members.begin(), members.end());
    orbit_members_.push_back(std::move(members));
  }
  index_ = std::make_shared<MonomialIndex>(MonomialIndex{std::move(index)});
}

std::size_t MonomialOrbits::index_of(std::span<const int> exps) const {
  if (static_cast<int>(exps.size()) != n_) throw ValidationError("exponent vector length");
  const auto it = index_->map.find(pack(exps));
  if (it == index_->map.end()) throw ValidationError("monomial not of this degree");
  return it->second;
}

std::uint64_t invariant_dim_by_degree(std::span<const Permutation> elements,
                                      int n, int degree, std::uint64_t budget) {
  return MonomialOrbits(elements, n, degree, budget).orbit_count();
}

std::vector<std::vector<ExponentVector>> monomial_orbit_sums(
    std::span<const Permutation> elements, int n, int degree,
    std::uint64_t budget) {
  const MonomialOrbits orbits(elements, n, degree, budget);
  std::vector<std::vector<ExponentVector>> out;
  out.reserve(orbits.orbit_count());
  for (std::size_t o = 0; o < orbits.orbit_count(); ++o) {
    std::vector<ExponentVector> sum;
    for (auto m : orbits.members(o)) sum.push_back(orbits.monomial(m));
    out.push_back(std::move(sum));
  }
  return out;
}

std::vector<BigInt> molien_hilbert_coeffs(std::span<const Permutation> elements,
                                          int n, int max_degree) {
  if (elements.empty()) throw ValidationError("group element list is empty");
  if (max_degree < 0) throw ValidationError("max_degree must be >= 0");
  const auto len = static_cast<std::size_t>(max_degree) + 1;
  std::vector<BigInt> total(len, 0);
  for (const auto& g : elements) {
    if (g.n() != n) throw ValidationError("group element does not act on n variables");
    // prod over cycles of 1/(1 - t^c): repeated prefix sums with stride c.
    std::vector<BigInt> series(len, 0);
    series[0] = 1;
    for (int c : g.cycle_lengths()) {
      for (std::size_t i = static_cast<std::size_t>(c); i < len; ++i) {
        series[i] += series[i - static_cast<std::size_t>(c)];
      }
    }
    for (std::size_t i = 0; i < len; ++i) total[i] += series[i];
  }
  const BigInt order = elements.size();
  for (auto& v : total) {
    if (v % order != 0) throw std::logic_error("Molien coefficient not integral");
    v /= order;
  }
  return total;
}

int GeneratorDegrees::max_degree() const {
  for (int d = static_cast<int>(new_count.size()) - 1; d >= 1; --d) {
    if (new_count[d] > 0) return d;
  }
  return 0;
}

std::vector<std::pair<int, int>> GeneratorDegrees::nonzero() const {
  std::vector<std::pair<int, int>> out;
  for (int d = 1; d < static_cast<int>(new_count.size()); ++d) {
    if (new_count[d] > 0) out.emplace_back(d, new_count[d]);
  }
  return out;
}

namespace {

struct SelectedGenerator {
  int degree;
  std::vector<ExponentVector> members;
};

// Feeds every row f * O (f a generator, O an orbit sum of complementary
// degree) into `echelon`, expressed in orbit-sum coordinates of degree d.
// Since f * O is invariant, its coefficient on orbit o equals its
// coefficient on o's representative monomial. Stops once the rank is full.
template <typename Echelon>
void add_product_rows(Echelon& echelon, const std::vector<SelectedGenerator>& gens,
                      const std::vector<MonomialOrbits>& by_degree, int d) {
  const MonomialOrbits& target = by_degree[static_cast<std::size_t>(d)];
  const std::size_t dim = target.orbit_count();
  const int n = target.n();
  ExponentVector beta(static_cast<std::size_t>(n));
  for (const auto& f : gens) {
    if (echelon.rank() == dim) return;
    const MonomialOrbits& rest = by_degree[static_cast<std::size_t>(d - f.degree)];
    std::vector<linalg::SparseRow<std::int64_t>> rows(rest.orbit_count());
    for (std::size_t o = 0; o < dim; ++o) {
      const ExponentVector& gamma = target.monomial(target.representative(o));
      for (const auto& alpha : f.members) {
        bool fits = true;
        for (int v = 0; v < n && fits; ++v) {
          beta[v] = gamma[v] - alpha[v];
          fits = beta[v] >= 0;
        }
        if (!fits) continue;
        auto& row = rows[rest.orbit_of(rest.index_of(beta))];
        if (!row.empty() && row.back().first == o) {
          ++row.back().second;
        } else {
          row.emplace_back(static_cast<std::uint32_t>(o), 1);
        }
      }
    }
    for (const auto& row : rows) {
      if (row.empty()) continue;
      echelon.add(row);
      if (echelon.rank() == dim) return;
    }
  }
}

template <typename Echelon>
std::vector<std::size_t> new_generator_orbits(Echelon& echelon, std::size_t dim) {
  std::vector<std::size_t> picked;
  for (std::size_t o = 0; o < dim && echelon.rank() < dim; ++o) {
    if (echelon.add({{static_cast<std::uint32_t>(o), 1}})) picked.push_back(o);
  }
  return picked;
}

}  // namespace

GeneratorDegrees generator_degrees(std::span<const Permutation> elements, int n,
                                   int degree_cap, const GeneratorOptions& options) {
  if (degree_cap < 0) throw ValidationError("degree cap must be >= 0");
  GeneratorDegrees out;
  out.n = n;
  out.degree_cap = degree_cap;
  out.new_count.push_back(0);
  std::vector<MonomialOrbits> by_degree;
  by_degree.emplace_back(elements, n, 0, options.monomial_budget);
  std::vector<SelectedGenerator> gens;

  for (int d = 1; d <= degree_cap; ++d) {
    try {
      by_degree.emplace_back(elements, n, d, options.monomial_budget);
    } catch (const BudgetError&) {
      break;
    }
    const std::size_t dim = by_degree.back().orbit_count();
    std::vector<std::size_t> picked;
    bool settled = false;
    if (options.arithmetic == Arithmetic::kModular) {
      linalg::ModularEchelon mod(dim, linalg::kPrimeA);
      add_product_rows(mod, gens, by_degree, d);
      // Full rank mod p forces full rank over Q.
      settled = mod.rank() == dim;
    }
    if (!settled) {
      linalg::IntegerEchelon exact(dim);
      add_product_rows(exact, gens, by_degree, d);
      picked = new_generator_orbits(exact, dim);
    }
    for (std::size_t o : picked) {
      const MonomialOrbits& orbits = by_degree.back();
      SelectedGenerator g{d, {}};
      for (auto m : orbits.members(o)) g.members.push_back(orbits.monomial(m));
      out.generators.push_back(Generator{d, orbits.monomial(orbits.representative(o))});
      gens.push_back(std::move(g));
    }
    out.new_count.push_back(static_cast<int>(picked.size()));
    out.verified_up_to = d;
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kHolds: return "true";
    case Verdict::kViolated: return "false";
    case Verdict::kVerifiedUpToCap: return "verified-up-to-cap";
  }
  return "?";
}

CapPolicy CapPolicy::parse(const std::string& text) {
  if (text == "full") return {Kind::kFull, 0};
  if (text == "2n") return {Kind::kTwoN, 0};
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size() && v >= 1) return {Kind::kFixed, v};
  } catch (const std::exception&) {
  }
  throw ValidationError("--cap must be 'full', '2n', or a positive degree, got '" + text + "'");
}

std::string CapPolicy::describe() const {
  switch (kind) {
    case Kind::kFull: return "full";
    case Kind::kTwoN: return "2n";
    case Kind::kFixed: return std::to_string(fixed);
  }
  return "?";
}

int full_degree_bound(int n) { return std::max(n, n * (n - 1) / 2); }

int degree_cap_for(int n, const CapPolicy& policy) {
  const int full = full_degree_bound(n);
  switch (policy.kind) {
    case CapPolicy::Kind::kFull: return full;
    case CapPolicy::Kind::kTwoN: return std::min(full, 2 * n);
    case CapPolicy::Kind::kFixed: return std::min(full, policy.fixed);
  }
  return full;
}

ConjectureReport check_conjectures(const graph::Graph& g, const CapPolicy& policy,
                                   const GeneratorOptions& options) {
  if (g.n() < 1) throw ValidationError("graph must have at least one vertex");
  ConjectureReport r;
  r.graph6 = graph::canonical_graph6(g);
  r.n = g.n();
  const auto elements = graph::automorphism_group(g);
  r.aut_order = elements.size();
  const perm::PermGroupSpec group{g.n(), elements};
  for (const auto& orbit : perm::vertex_orbits(group)) {
    r.orbit_sizes.push_back(static_cast<int>(orbit.size()));
  }
  r.max_orbit = *std::max_element(r.orbit_sizes.begin(), r.orbit_sizes.end());
  r.full_bound = full_degree_bound(r.n);
  r.degree_cap = degree_cap_for(r.n, policy);
  const auto degrees = generator_degrees(elements, r.n, r.degree_cap, options);
  r.generator_degrees = degrees.nonzero();
  r.verified_up_to = degrees.verified_up_to;
  r.beta_proxy = degrees.max_degree();
  auto verdict = [&](int bound) {
    if (r.beta_proxy > bound) return Verdict::kViolated;
    return r.verified_up_to >= r.full_bound ? Verdict::kHolds : Verdict::kVerifiedUpToCap;
  };
  r.a_holds = verdict(r.n);
  r.b_holds = verdict(r.max_orbit);
  return r;
}

bool SweepResult::any_counterexample() const {
  return std::any_of(reports.begin(), reports.end(),
                     [](const ConjectureReport& r) { return r.counterexample(); });
}

SweepResult sweep_graphs(const std::vector<graph::Graph>& graphs,
                         const CapPolicy& policy, int jobs,
                         const GeneratorOptions& options) {
  SweepResult result;
  result.reports.resize(graphs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < graphs.size(); i = next++) {
      try {
        result.reports[i] = check_conjectures(graphs[i], policy, options);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(graphs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  std::stable_sort(result.reports.begin(), result.reports.end(),
                   [](const ConjectureReport& a, const ConjectureReport& b) {
                     return a.graph6 < b.graph6;
                   });
  for (const auto& r : result.reports) {
    if (result.summary.empty() || result.summary.back().n != r.n) {
      result.summary.push_back(SweepSummaryRow{r.n});
    }
    auto& row = result.summary.back();
    ++row.graphs;
    auto tally = [](Verdict v, int& t, int& f, int& c) {
      (v == Verdict::kHolds ? t : v == Verdict::kViolated ? f : c)++;
    };
    tally(r.a_holds, row.a_true, row.a_false, row.a_capped);
    tally(r.b_holds, row.b_true, row.b_false, row.b_capped);
  }
  std::sort(result.summary.begin(), result.summary.end(),
            [](const auto& a, const auto& b) { return a.n < b.n; });
  return result;
}

SweepResult sweep(int n_max, const CapPolicy& policy, int jobs,
                  const GeneratorOptions& options) {
  if (n_max < 1 || n_max > graph::kMaxEnumerationVertices) {
    throw ValidationError("--nmax must be in 1.." +
                          std::to_string(graph::kMaxEnumerationVertices));
  }
  std::vector<graph::Graph> graphs;
  for (int n = 1; n <= n_max; ++n) {
    auto level = graph::enumerate_graphs(n);
    graphs.insert(graphs.end(), level.begin(), level.end());
  }
  return sweep_graphs(graphs, policy, jobs, options);
}

namespace {

std::string degree_list(const std::vector<std::pair<int, int>>& degrees) {
  std::string out;
  for (const auto& [d, c] : degrees) {
    if (!out.empty()) out += ';';
    out += std::to_string(d) + ':' + std::to_string(c);
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_reports_csv(std::ostream& out, const std::vector<ConjectureReport>& reports) {
  out << "graph6,n,aut_order,max_orbit,generator_degrees,beta_proxy,verified_up_to,"
         "full_bound,A,B\n";
  for (const auto& r : reports) {
    out << csv_field(r.graph6) << ',' << r.n << ',' << r.aut_order << ',' << r.max_orbit
        << ',' << degree_list(r.generator_degrees) << ',' << r.beta_proxy << ','
        << r.verified_up_to << ',' << r.full_bound << ',' << to_string(r.a_holds) << ','
        << to_string(r.b_holds) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SweepSummaryRow>& rows) {
  out << "n,graphs,A_true,A_false,A_capped,B_true,B_false,B_capped\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.graphs << ',' << r.a_true << ',' << r.a_false << ','
        << r.a_capped << ',' << r.b_true << ',' << r.b_false << ',' << r.b_capped << '\n';
  }
}

nlohmann::json to_json(const ConjectureReport& r) {
  nlohmann::json degrees = nlohmann::json::array();
  for (const auto& [d, c] : r.generator_degrees) degrees.push_back({{"degree", d}, {"count", c}});
  return {{"graph6", r.graph6},
          {"n", r.n},
          {"aut_order", r.aut_order},
          {"orbit_sizes", r.orbit_sizes},
          {"max_orbit", r.max_orbit},
          {"generator_degrees", degrees},
          {"beta_proxy", r.beta_proxy},
          {"degree_cap", r.degree_cap},
          {"full_bound", r.full_bound},
          {"verified_up_to_degree", r.verified_up_to},
          {"A_holds", to_string(r.a_holds)},
          {"B_holds", to_string(r.b_holds)}};
}

}  // namespace invlayers::invring
