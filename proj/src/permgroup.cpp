#include "invlayers/permgroup.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <queue>
#include <set>
#include <string>

#include "invlayers/errors.hpp"

namespace invlayers::perm {

namespace {

std::uint64_t env_or(const char* name, std::uint64_t fallback) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || value == 0) {
    throw ValidationError(std::string(name) + " must be a positive integer");
  }
  return value;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t size) : parent_(size) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

void check_generators(const PermGroupSpec& group) {
  for (const auto& g : group.generators) {
    if (g.n() != group.n) {
      throw ValidationError("generator acts on " + std::to_string(g.n()) +
                            " points, group declared on " +
                            std::to_string(group.n));
    }
  }
}

}  // namespace

Budgets Budgets::from_env() {
  Budgets b;
  b.tuple_budget = env_or("INVLAYERS_TUPLE_BUDGET", b.tuple_budget);
  b.closure_cap = env_or("INVLAYERS_CLOSURE_CAP", b.closure_cap);
  return b;
}

Permutation::Permutation(std::vector<std::uint32_t> image)
    : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (std::uint32_t v : image_) {
    if (v >= image_.size() || seen[v]) {
      throw ValidationError("permutation image is not a bijection");
    }
    seen[v] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<std::uint32_t> image(static_cast<std::size_t>(n));
  std::iota(image.begin(), image.end(), 0u);
  return Permutation(std::move(image));
}

Permutation Permutation::from_one_based(const std::vector<int>& image) {
  std::vector<std::uint32_t> zero_based;
  zero_based.reserve(image.size());
  for (int v : image) {
    if (v < 1) throw ValidationError("1-based permutation entry below 1");
    zero_based.push_back(static_cast<std::uint32_t>(v - 1));
  }
  return Permutation(std::move(zero_based));
}

Permutation Permutation::transposition(int n, int a, int b) {
  auto p = identity(n);
  std::swap(p.image_[a], p.image_[b]);
  return p;
}

std::vector<int> Permutation::one_based() const {
  std::vector<int> out;
  out.reserve(image_.size());
  for (auto v : image_) out.push_back(static_cast<int>(v) + 1);
  return out;
}

Permutation Permutation::operator*(const Permutation& q) const {
  if (q.n() != n()) throw ValidationError("composing permutations of different sizes");
  Permutation r;
  r.image_.resize(image_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) r.image_[i] = image_[q.image_[i]];
  return r;
}

Permutation Permutation::inverse() const {
  Permutation r;
  r.image_.resize(image_.size());
  for (std::size_t i = 0; i < image_.size(); ++i) {
    r.image_[image_[i]] = static_cast<std::uint32_t>(i);
  }
  return r;
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < image_.size(); ++i) {
    if (image_[i] != i) return false;
  }
  return true;
}

int Permutation::fixed_points() const {
  int count = 0;
  for (std::size_t i = 0; i < image_.size(); ++i) count += image_[i] == i;
  return count;
}

std::vector<int> Permutation::cycle_lengths() const {
  std::vector<int> lengths;
  std::vector<bool> seen(image_.size(), false);
  for (std::size_t start = 0; start < image_.size(); ++start) {
    if (seen[start]) continue;
    int len = 0;
    for (std::size_t i = start; !seen[i]; i = image_[i]) {
      seen[i] = true;
      ++len;
    }
    lengths.push_back(len);
  }
  return lengths;
}

TypedNodeSet::TypedNodeSet(std::vector<int> type_sizes)
    : sizes_(std::move(type_sizes)) {
  if (sizes_.empty()) throw ValidationError("at least one node type required");
  for (int t = 0; t < m(); ++t) {
    if (sizes_[t] < 1) throw ValidationError("type sizes must be positive");
    offsets_.push_back(n_);
    node_type_.insert(node_type_.end(), static_cast<std::size_t>(sizes_[t]), t);
    n_ += sizes_[t];
  }
}

TypedNodeSet::Relabeled TypedNodeSet::from_node_types(
    const std::vector<int>& node_types, int num_types) {
  std::vector<int> sizes(static_cast<std::size_t>(num_types), 0);
  for (int t : node_types) {
    if (t < 0 || t >= num_types) throw ValidationError("node type out of range");
    ++sizes[t];
  }
  TypedNodeSet nodes(sizes);
  std::vector<int> cursor(nodes.offsets_);
  std::vector<std::uint32_t> image(node_types.size());
  for (std::size_t i = 0; i < node_types.size(); ++i) {
    image[i] = static_cast<std::uint32_t>(cursor[node_types[i]]++);
  }
  return Relabeled{std::move(nodes), Permutation(std::move(image))};
}

std::vector<int> TypedNodeSet::block(int type) const {
  std::vector<int> out(static_cast<std::size_t>(sizes_[type]));
  std::iota(out.begin(), out.end(), offsets_[type]);
  return out;
}

PermGroupSpec young_generators(const TypedNodeSet& nodes) {
  PermGroupSpec g{nodes.n(), {}};
  for (int t = 0; t < nodes.m(); ++t) {
    const int begin = nodes.begin_of(t);
    for (int i = 0; i + 1 < nodes.size_of(t); ++i) {
      g.generators.push_back(
          Permutation::transposition(nodes.n(), begin + i, begin + i + 1));
    }
  }
  return g;
}

PermGroupSpec cyclic_generators(int n) {
  if (n < 1) throw ValidationError("cyclic group needs n >= 1");
  std::vector<std::uint32_t> image(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) image[i] = static_cast<std::uint32_t>((i + 1) % n);
  return PermGroupSpec{n, {Permutation(std::move(image))}};
}

PermGroupSpec translation_generators(int d) {
  if (d < 1) throw ValidationError("translation group needs d >= 1");
  const int n = d * d;
  std::vector<std::uint32_t> rows(static_cast<std::size_t>(n));
  std::vector<std::uint32_t> cols(static_cast<std::size_t>(n));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      rows[i * d + j] = static_cast<std::uint32_t>(((i + 1) % d) * d + j);
      cols[i * d + j] = static_cast<std::uint32_t>(i * d + (j + 1) % d);
    }
  }
  return PermGroupSpec{n, {Permutation(std::move(rows)), Permutation(std::move(cols))}};
}

std::vector<Permutation> group_closure(const PermGroupSpec& group,
                                       std::size_t cap) {
  check_generators(group);
  std::vector<Permutation> elements{Permutation::identity(group.n)};
  std::set<Permutation> seen{elements.front()};
  // For a finite group, closure under right multiplication by generators
  // already yields every element (inverses are positive powers).
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (const auto& gen : group.generators) {
      Permutation next = elements[head] * gen;
      if (seen.insert(next).second) {
        if (elements.size() >= cap) {
          throw BudgetError("group order exceeds closure cap " +
                            std::to_string(cap));
        }
        elements.push_back(std::move(next));
      }
    }
  }
  return elements;
}

std::uint64_t orbit_count_on_tuples(const PermGroupSpec& group, int k,
                                    std::uint64_t tuple_budget) {
  check_generators(group);
  if (k < 0) throw ValidationError("k must be >= 0");
  const std::uint64_t n = static_cast<std::uint64_t>(group.n);
  std::uint64_t total = 1;
  for (int i = 0; i < k; ++i) {
    if (n != 0 && total > tuple_budget / std::max<std::uint64_t>(n, 1)) {
      throw BudgetError("n^k exceeds tuple budget " + std::to_string(tuple_budget) +
                        "; use burnside_count instead");
    }
    total *= n;
  }
  if (total > tuple_budget) {
    throw BudgetError("n^k = " + std::to_string(total) +
                      " exceeds tuple budget " + std::to_string(tuple_budget) +
                      "; use burnside_count instead");
  }
  UnionFind uf(total);
  std::uint64_t orbits = total;
  std::vector<std::uint32_t> digits(static_cast<std::size_t>(k));
  for (const auto& gen : group.generators) {
    if (gen.is_identity()) continue;
    std::fill(digits.begin(), digits.end(), 0);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::uint64_t image = 0;
      for (int s = 0; s < k; ++s) image = image * n + gen(digits[s]);
      if (uf.unite(idx, image)) --orbits;
      for (int s = k - 1; s >= 0; --s) {
        if (++digits[s] < n) break;
        digits[s] = 0;
      }
    }
  }
  return orbits;
}

BigInt burnside_count(std::span<const Permutation> elements, int k) {
  if (elements.empty()) throw ValidationError("empty element list");
  if (k < 0) throw ValidationError("k must be >= 0");
  BigInt sum = 0;
  for (const auto& g : elements) sum += boost::multiprecision::pow(BigInt(g.fixed_points()), static_cast<unsigned>(k));
  const BigInt order = elements.size();
  if (sum % order != 0) {
    throw std::logic_error("Burnside sum not divisible by group order");
  }
  return sum / order;
}

BigInt burnside_count(const PermGroupSpec& group, int k, std::size_t cap) {
  const auto elements = group_closure(group, cap);
  return burnside_count(std::span<const Permutation>(elements), k);
}

std::vector<std::vector<int>> vertex_orbits(const PermGroupSpec& group) {
  check_generators(group);
  UnionFind uf(static_cast<std::size_t>(group.n));
  for (const auto& gen : group.generators) {
    for (int i = 0; i < group.n; ++i) uf.unite(i, gen(i));
  }
  std::vector<std::vector<int>> orbits;
  std::vector<int> slot(static_cast<std::size_t>(group.n), -1);
  for (int i = 0; i < group.n; ++i) {
    const auto root = uf.find(i);
    if (slot[root] == -1) {
      slot[root] = static_cast<int>(orbits.size());
      orbits.emplace_back();
    }
    orbits[slot[root]].push_back(i);
  }
  return orbits;
}

int max_orbit_size(const PermGroupSpec& group) {
  int best = 0;
  for (const auto& orbit : vertex_orbits(group)) {
    best = std::max(best, static_cast<int>(orbit.size()));
  }
  return best;
}

}  // namespace invlayers::perm
