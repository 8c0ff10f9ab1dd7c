#include "invlayers/zero_sum.hpp"

#include <algorithm>
#include <string>

#include <nlohmann/json.hpp>

#include "invlayers/errors.hpp"

namespace invlayers::zerosum {

namespace {

int mod(int v, int d) { return ((v % d) + d) % d; }

}  // namespace

GroupSequence::GroupSequence(int d)
    : d_(d), mult_(static_cast<std::size_t>(d > 0 ? d * d : 0), 0) {
  if (d < 1) throw ValidationError("modulus d must be >= 1");
}

GroupSequence GroupSequence::from_elements(int d,
                                           const std::vector<Element>& elements) {
  GroupSequence s(d);
  for (const auto& [a, b] : elements) s.add(a, b);
  return s;
}

std::vector<Element> GroupSequence::elements() const {
  std::vector<Element> out;
  out.reserve(static_cast<std::size_t>(degree_));
  for (int a = 0; a < d_; ++a) {
    for (int b = 0; b < d_; ++b) {
      for (int c = 0; c < multiplicity(a, b); ++c) out.emplace_back(a, b);
    }
  }
  return out;
}

Element GroupSequence::sum() const {
  long long sa = 0, sb = 0;
  for (int a = 0; a < d_; ++a) {
    for (int b = 0; b < d_; ++b) {
      sa += static_cast<long long>(a) * multiplicity(a, b);
      sb += static_cast<long long>(b) * multiplicity(a, b);
    }
  }
  return {static_cast<int>(sa % d_), static_cast<int>(sb % d_)};
}

void GroupSequence::add(int a, int b, int count) {
  if (count < 0) throw ValidationError("negative multiplicity");
  mult_[index(mod(a, d_), mod(b, d_))] += count;
  degree_ += count;
}

GroupSequence& GroupSequence::operator+=(const GroupSequence& other) {
  if (other.d_ != d_) throw ValidationError("sequences over different groups");
  for (std::size_t i = 0; i < mult_.size(); ++i) mult_[i] += other.mult_[i];
  degree_ += other.degree_;
  return *this;
}

GroupSequence& GroupSequence::operator-=(const GroupSequence& other) {
  if (!contains(other)) throw ValidationError("subtracting a non-sub-multiset");
  for (std::size_t i = 0; i < mult_.size(); ++i) mult_[i] -= other.mult_[i];
  degree_ -= other.degree_;
  return *this;
}

bool GroupSequence::contains(const GroupSequence& other) const {
  if (other.d_ != d_) return false;
  for (std::size_t i = 0; i < mult_.size(); ++i) {
    if (other.mult_[i] > mult_[i]) return false;
  }
  return true;
}

bool is_zero_sum(const GroupSequence& s) { return s.sum() == Element{0, 0}; }

namespace {

// Subset-sum reachability over the d^2 group elements, scanning `elems` in
// order. Each sum remembers the element that first reached it and the sum it
// came from, which is enough to rebuild one subset per reachable sum.
std::optional<GroupSequence> search_prefix(int d,
                                           const std::vector<Element>& elems) {
  const int cells = d * d;
  constexpr int kNone = -1;
  std::vector<int> via(static_cast<std::size_t>(cells), kNone);
  std::vector<int> from(static_cast<std::size_t>(cells), kNone);
  std::vector<int> reached;
  auto key = [d](int a, int b) { return a * d + b; };
  for (int i = 0; i < static_cast<int>(elems.size()); ++i) {
    const auto [ea, eb] = elems[i];
    const std::vector<int> snapshot = reached;
    auto visit = [&](int target, int parent) {
      if (via[target] != kNone) return;
      via[target] = i;
      from[target] = parent;
      reached.push_back(target);
    };
    visit(key(ea, eb), kNone);
    for (int s : snapshot) visit(key((s / d + ea) % d, (s % d + eb) % d), s);
    if (via[0] != kNone) {
      GroupSequence out(d);
      for (int cur = 0; cur != kNone; cur = from[cur]) {
        const auto [a, b] = elems[via[cur]];
        out.add(a, b);
      }
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<GroupSequence> find_zero_sum_subsequence(const GroupSequence& s,
                                                       std::uint64_t budget) {
  if (static_cast<std::uint64_t>(s.degree()) > budget) {
    throw BudgetError("sequence degree " + std::to_string(s.degree()) +
                      " exceeds search budget " + std::to_string(budget));
  }
  const int d = s.d();
  auto elems = s.elements();
  const std::size_t window = static_cast<std::size_t>(2 * d - 1);
  if (elems.size() >= window) {
    std::vector<Element> prefix(elems.begin(), elems.begin() + static_cast<std::ptrdiff_t>(window));
    if (auto found = search_prefix(d, prefix)) return found;
    // Unreachable when D(C_d x C_d) = 2d - 1; fall through to the full scan.
  }
  return search_prefix(d, elems);
}

bool is_indecomposable(const GroupSequence& s) {
  if (s.degree() == 0 || !is_zero_sum(s)) return false;
  // A proper zero-sum part misses some element e, so it lies inside s - e.
  for (int a = 0; a < s.d(); ++a) {
    for (int b = 0; b < s.d(); ++b) {
      if (s.multiplicity(a, b) == 0) continue;
      GroupSequence rest = s;
      rest -= GroupSequence::from_elements(s.d(), {{a, b}});
      if (find_zero_sum_subsequence(rest, UINT64_MAX)) return false;
    }
  }
  return true;
}

GroupSequence classical_zero_sum_free_witness(int d) {
  GroupSequence s(d);
  if (d > 1) {
    s.add(1, 0, d - 1);
    s.add(0, 1, d - 1);
  }
  return s;
}

namespace {

struct SearchNode {
  std::vector<std::uint8_t> elems;  // nondecreasing element indices a*d+b
  std::vector<std::uint64_t> sums;  // bitset over d^2 reachable subset sums
};

bool test_bit(const std::vector<std::uint64_t>& bits, int i) {
  return (bits[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1u;
}

void set_bit(std::vector<std::uint64_t>& bits, int i) {
  bits[static_cast<std::size_t>(i) / 64] |= std::uint64_t{1} << (i % 64);
}

}  // namespace

DavenportResult davenport_constant(int d, std::uint64_t node_budget) {
  if (d < 1) throw ValidationError("d must be >= 1");
  if (d > 15) throw BudgetError("davenport search supports d <= 15");
  const int cells = d * d;
  const std::size_t words = static_cast<std::size_t>((cells + 63) / 64);
  DavenportResult result;
  result.d = d;
  result.witness = GroupSequence(d);

  // Level 0: the empty sequence is zero-sum free.
  std::vector<SearchNode> level{SearchNode{{}, std::vector<std::uint64_t>(words, 0)}};
  int length = 0;
  while (true) {
    std::vector<SearchNode> next;
    for (const auto& node : level) {
      const int first = node.elems.empty() ? 1 : node.elems.back();
      for (int g = first; g < cells; ++g) {
        const int ga = g / d, gb = g % d;
        std::vector<std::uint64_t> sums = node.sums;
        set_bit(sums, g);
        for (int s = 0; s < cells; ++s) {
          if (test_bit(node.sums, s)) {
            set_bit(sums, ((s / d + ga) % d) * d + (s % d + gb) % d);
          }
        }
        if (test_bit(sums, 0)) continue;
        if (++result.nodes > node_budget) {
          result.checked_up_to_length = length;
          return result;
        }
        SearchNode child{node.elems, std::move(sums)};
        child.elems.push_back(static_cast<std::uint8_t>(g));
        next.push_back(std::move(child));
      }
    }
    ++length;
    result.checked_up_to_length = length;
    if (next.empty()) {
      result.certified = true;
      result.constant = length;
      result.max_zero_sum_free_length = length - 1;
      GroupSequence w(d);
      for (auto g : level.front().elems) w.add(g / d, g % d);
      result.witness = w;
      return result;
    }
    result.max_zero_sum_free_length = length;
    level = std::move(next);
  }
}

std::vector<GroupSequence> decompose_invariant_monomial(const GroupSequence& s) {
  if (!is_zero_sum(s)) {
    throw ValidationError("decompose_invariant_monomial needs a zero-sum sequence");
  }
  const int bound = 2 * s.d() - 1;
  std::vector<GroupSequence> factors;
  GroupSequence rest = s;
  while (rest.degree() > bound) {
    auto factor = find_zero_sum_subsequence(rest, UINT64_MAX);
    if (!factor || factor->degree() > bound) {
      throw std::logic_error("no short zero-sum subsequence in a long sequence");
    }
    rest -= *factor;
    if (!is_zero_sum(rest)) throw std::logic_error("complement of a zero-sum part is not zero-sum");
    factors.push_back(std::move(*factor));
  }
  if (rest.degree() > 0 || factors.empty()) factors.push_back(std::move(rest));
  return factors;
}

TranslationDegreeCertificate max_generator_degree_translation(
    int d, std::uint64_t node_budget) {
  if (d < 1) throw ValidationError("d must be >= 1");
  TranslationDegreeCertificate cert;
  cert.degree = 2 * d - 1;
  if (d <= kDavenportMaxD) cert.davenport = davenport_constant(d, node_budget);
  // Witness of length 2d-2 plus the element cancelling its sum.
  GroupSequence s = classical_zero_sum_free_witness(d);
  const auto [sa, sb] = s.sum();
  s.add(-sa, -sb);
  cert.indecomposable = s;
  cert.indecomposable_verified = s.degree() == cert.degree && is_indecomposable(s);
  return cert;
}

nlohmann::json to_json(const GroupSequence& s) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [a, b] : s.elements()) out.push_back({a, b});
  return out;
}

GroupSequence sequence_from_json(int d, const nlohmann::json& pairs) {
  if (!pairs.is_array()) throw ValidationError("sequence must be a JSON array of [a, b] pairs");
  GroupSequence s(d);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() ||
        !p[1].is_number_integer()) {
      throw ValidationError("sequence entry " + std::to_string(i + 1) +
                            " is not an [a, b] integer pair");
    }
    s.add(p[0].get<int>(), p[1].get<int>());
  }
  return s;
}

}  // namespace invlayers::zerosum
