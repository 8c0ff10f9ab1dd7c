#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "invlayers/combinat.hpp"
#include "invlayers/errors.hpp"
#include "invlayers/permgroup.hpp"
#include "invlayers/tensor_basis.hpp"

using namespace invlayers;
using namespace invlayers::basis;
using combinat::BigInt;

namespace {

// Enumerate every k-tuple over n as vectors.
std::vector<std::vector<int>> all_tuples(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> t(static_cast<std::size_t>(k), 0);
  while (true) {
    out.push_back(t);
    int a = k - 1;
    while (a >= 0 && ++t[a] == n) t[a--] = 0;
    if (a < 0) break;
  }
  if (k == 0) out.resize(1);
  return out;
}

// Independent membership test: axis types respected and the equality
// pattern among same-type axes matches gamma exactly.
bool oracle_member(const combinat::ColoredPartition& c, const TypedNodeSet& nodes,
                   const std::vector<int>& t) {
  const int k = c.k();
  for (int s = 0; s < k; ++s) {
    if (nodes.type_of(t[s]) != c.axis_type(s)) return false;
  }
  for (int s = 0; s < k; ++s) {
    for (int u = 0; u < k; ++u) {
      const bool same_block = c.partition().block_of(s) == c.partition().block_of(u);
      if ((t[s] == t[u]) != same_block) return false;
    }
  }
  return true;
}

DenseTensor random_tensor(int n, int k, std::mt19937_64& rng) {
  auto x = DenseTensor::zeros(n, k);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& v : x.data) v = u(rng);
  return x;
}

std::vector<std::vector<int>> size_vectors(int max_n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int left) {
    if (!cur.empty()) out.push_back(cur);
    for (int s = 1; s <= left; ++s) {
      cur.push_back(s);
      rec(left - s);
      cur.pop_back();
    }
  };
  rec(max_n);
  return out;
}

}  // namespace

TEST_CASE("basis elements from the two-type example") {
  const TypedNodeSet nodes({2, 1});
  const auto diag = combinat::ColoredPartition::from_typed(
      {0, 0}, {combinat::SetPartition::from_rgs({0, 0}), combinat::SetPartition::from_rgs({})}, 2);
  CHECK(build_basis_element(diag, nodes).tensor ==
        SparseIndicatorTensor::from_tuples(3, 2, {{0, 0}, {1, 1}}));
  const auto cross = combinat::ColoredPartition::from_typed(
      {0, 1}, {combinat::SetPartition::from_rgs({0}), combinat::SetPartition::from_rgs({0})}, 2);
  CHECK(build_basis_element(cross, nodes).tensor ==
        SparseIndicatorTensor::from_tuples(3, 2, {{0, 2}, {1, 2}}));
  const auto distinct = combinat::ColoredPartition::from_typed(
      {0, 0}, {combinat::SetPartition::from_rgs({0, 1}), combinat::SetPartition::from_rgs({})}, 2);
  CHECK(build_basis_element(distinct, TypedNodeSet({1, 1})).empty());
}

TEST_CASE("membership rule matches a direct tuple scan") {
  for (const auto& sizes : size_vectors(4)) {
    const TypedNodeSet nodes(sizes);
    for (int k = 0; k <= 3; ++k) {
      for (const auto& c : combinat::enumerate_colored_partitions(k, nodes.m())) {
        const auto e = build_basis_element(c, nodes);
        std::vector<std::vector<int>> expected;
        for (const auto& t : all_tuples(nodes.n(), k)) {
          if (oracle_member(c, nodes, t)) expected.push_back(t);
        }
        CHECK(e.tensor == SparseIndicatorTensor::from_tuples(nodes.n(), k, expected));
      }
    }
  }
}

TEST_CASE("full bases partition the index space") {
  for (const auto& sizes : size_vectors(6)) {
    if (sizes.size() > 3) continue;
    const TypedNodeSet nodes(sizes);
    const auto group = perm::young_generators(nodes);
    for (int k = 1; k <= 3; ++k) {
      const auto b = build_full_basis(k, nodes);
      CHECK(BigInt(b.elements.size()) == combinat::gen_bell(nodes.m(), k));
      CHECK(verify_orthogonality(b));
      CHECK(verify_covering(b));
      CHECK(b.nonempty_count() == perm::orbit_count_on_tuples(group, k, 10'000'000));
      const bool large = std::all_of(sizes.begin(), sizes.end(), [&](int s) { return s >= k; });
      if (large) CHECK(BigInt(b.nonempty_count()) == combinat::gen_bell(nodes.m(), k));
      for (const auto& e : b.elements) {
        CHECK(verify_invariance(e.tensor, group));
        if (e.empty()) {
          // Empty only when some type has fewer nodes than gamma has blocks.
          bool starved = false;
          for (int t = 0; t < nodes.m(); ++t) {
            starved |= e.descriptor.blocks_of_type(t) > nodes.size_of(t);
          }
          CHECK(starved);
        }
      }
    }
  }
}

TEST_CASE("small-n caveat is observable") {
  const auto b = build_full_basis(2, TypedNodeSet({2, 1}));
  CHECK(b.elements.size() == 6);
  CHECK(b.nonempty_count() == 5);
  const auto b22 = build_full_basis(2, TypedNodeSet({2, 2}));
  CHECK(b22.nonempty_count() == 6);
  const auto single = build_full_basis(2, TypedNodeSet({3}));
  REQUIRE(single.elements.size() == 2);
  CHECK(single.elements[0].tensor.size() == 3);
  CHECK(single.elements[1].tensor.size() == 6);
  const auto b311 = build_full_basis(3, TypedNodeSet({1, 1}));
  CHECK(b311.elements.size() == 22);
  for (const auto& e : b311.elements) {
    const bool one_block_each =
        e.descriptor.blocks_of_type(0) <= 1 && e.descriptor.blocks_of_type(1) <= 1;
    CHECK(e.empty() == !one_block_each);
  }
  CHECK(b311.nonempty_count() == perm::orbit_count_on_tuples(perm::PermGroupSpec{2, {}}, 3, 100));
}

TEST_CASE("invariance check rejects non-invariant tensors") {
  const auto s3 = perm::young_generators(TypedNodeSet({3}));
  CHECK(!verify_invariance(SparseIndicatorTensor::from_tuples(3, 2, {{0, 1}}), s3));
  CHECK(verify_invariance(SparseIndicatorTensor::from_tuples(3, 2, {{0, 0}, {1, 1}, {2, 2}}), s3));
}

TEST_CASE("functionals") {
  const TypedNodeSet nodes({2, 1});
  const auto b = build_full_basis(2, nodes);
  auto ones = DenseTensor::zeros(3, 2);
  for (auto& v : ones.data) v = 1;
  auto identity = DenseTensor::zeros(3, 2);
  for (int i = 0; i < 3; ++i) identity[static_cast<std::uint64_t>(i * 3 + i)] = 1;
  for (const auto& e : b.elements) {
    CHECK(apply_functional(e, ones) == doctest::Approx(static_cast<double>(e.tensor.size())));
    if (e.empty()) CHECK(apply_functional(e, ones) == 0);
  }
  CHECK(apply_functional(b.elements[0], identity) == 2);
  CHECK_THROWS_AS(apply_functional(b.elements[0], DenseTensor::zeros(3, 1)), ValidationError);
}

TEST_CASE("functionals are invariant on random inputs") {
  std::mt19937_64 rng(3);
  for (const auto& sizes : std::vector<std::vector<int>>{{3, 2}, {2, 2, 1}, {4}}) {
    const TypedNodeSet nodes(sizes);
    const auto group = perm::young_generators(nodes);
    for (int k = 1; k <= 3; ++k) {
      const auto b = build_full_basis(k, nodes);
      for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_tensor(nodes.n(), k, rng);
        for (const auto& p : group.generators) {
          const auto px = x.permuted(p);
          for (const auto& e : b.elements) {
            CHECK(std::abs(apply_functional(e, x) - apply_functional(e, px)) <= 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("decomposition is the group average") {
  std::mt19937_64 rng(5);
  const TypedNodeSet nodes({2, 1});
  const auto b = build_full_basis(2, nodes);
  const auto elems = perm::group_closure(perm::young_generators(nodes), 100);
  REQUIRE(elems.size() == 2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_tensor(3, 2, rng);
    auto avg = DenseTensor::zeros(3, 2);
    for (const auto& g : elems) {
      const auto gx = x.permuted(g);
      for (std::size_t i = 0; i < avg.data.size(); ++i) avg.data[i] += gx.data[i] / 2.0;
    }
    const auto coeffs = decompose(x, b);
    const auto rec = reconstruct(coeffs, b);
    for (std::size_t i = 0; i < avg.data.size(); ++i) CHECK(rec.data[i] == doctest::Approx(avg.data[i]).epsilon(1e-12));
    // Projection fixes invariant tensors.
    const auto again = reconstruct(decompose(rec, b), b);
    for (std::size_t i = 0; i < rec.data.size(); ++i) CHECK(std::abs(again.data[i] - rec.data[i]) <= 1e-15);
  }
}

TEST_CASE("equivariant bases") {
  const auto fig3 = equivariant_basis(1, 1, TypedNodeSet({3, 2}));
  CHECK(fig3.basis.elements.size() == 6);
  CHECK(fig3.basis.nonempty_count() == 6);
  const auto fig4 = equivariant_basis(2, 1, TypedNodeSet({3, 3}));
  CHECK(fig4.basis.elements.size() == 22);
  CHECK(fig4.basis.nonempty_count() == 22);
  const auto single = equivariant_basis(1, 1, TypedNodeSet({4}));
  CHECK(single.basis.elements.size() == 2);
  CHECK(equivariant_basis(1, 1, TypedNodeSet({3, 2})).basis.elements.size() ==
        build_full_basis(2, TypedNodeSet({3, 2})).elements.size());
}

TEST_CASE("matrix elements commute with typed permutations") {
  const TypedNodeSet nodes({3, 2});
  const auto eb = equivariant_basis(1, 1, nodes);
  const auto group = perm::young_generators(nodes);
  const int n = nodes.n();
  for (const auto& e : eb.basis.elements) {
    // Dense matrix M(i, j) = 1 when (i, j) is in the support.
    std::vector<int> M(static_cast<std::size_t>(n * n), 0);
    for (std::size_t s = 0; s < e.tensor.size(); ++s) {
      const auto t = e.tensor.tuple(s);
      M[t[0] * n + t[1]] = 1;
    }
    for (const auto& p : group.generators) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) CHECK(M[p(i) * n + p(j)] == M[i * n + j]);
      }
    }
    // apply_equivariant is y_j = sum_i M(i, j) x_i.
    auto x = DenseTensor::zeros(n, 1);
    for (int i = 0; i < n; ++i) x[static_cast<std::uint64_t>(i)] = i + 1;
    const auto y = apply_equivariant(e, 1, x);
    for (int j = 0; j < n; ++j) {
      double expect = 0;
      for (int i = 0; i < n; ++i) expect += M[i * n + j] * (i + 1);
      CHECK(y[static_cast<std::uint64_t>(j)] == expect);
    }
  }
}

TEST_CASE("basis files round trip") {
  for (const auto& sizes : std::vector<std::vector<int>>{{2, 1}, {3}, {1, 1, 1}}) {
    const auto b = build_full_basis(2, TypedNodeSet(sizes));
    std::stringstream ss;
    serialize_basis(ss, b);
    const auto back = load_basis(ss);
    CHECK(back.nodes == b.nodes);
    CHECK(back.order == b.order);
    REQUIRE(back.elements.size() == b.elements.size());
    for (std::size_t i = 0; i < b.elements.size(); ++i) {
      CHECK(back.elements[i].descriptor == b.elements[i].descriptor);
      CHECK(back.elements[i].tensor == b.elements[i].tensor);
    }
  }
  std::stringstream ss;
  serialize_basis(ss, build_full_basis(2, TypedNodeSet({2, 1})));
  const std::string text = ss.str();
  CHECK(text.find("\"empty\":true") != std::string::npos);
  CHECK(text.find("\"support\":[]") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("malformed basis files report the line") {
  std::stringstream ss;
  serialize_basis(ss, build_full_basis(2, TypedNodeSet({2, 1})));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  auto load_with = [&](std::size_t index, const std::string& replacement) -> std::size_t {
    auto copy = lines;
    copy[index] = replacement;
    std::stringstream in;
    for (const auto& l : copy) in << l << '\n';
    try {
      load_basis(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(load_with(3, "{not json") == 4);
  CHECK(load_with(0, R"({"format":"other"})") == 1);
  // A support tuple that breaks the membership rule.
  std::string tampered = lines[1];
  tampered.replace(tampered.find("[[1,1],[2,2]]"), 13, "[[1,1],[1,2]]");
  CHECK(load_with(1, tampered) == 2);
  // Truncated file: count in the header no longer matches.
  std::stringstream truncated;
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) truncated << lines[i] << '\n';
  CHECK_THROWS_AS(load_basis(truncated), ParseError);
}

TEST_CASE("budgets") {
  CHECK_THROWS_AS(index_space_size(100, 4, 10'000'000), BudgetError);
  CHECK(index_space_size(10, 7, 10'000'000) == 10'000'000);
  CHECK_THROWS_AS(build_full_basis(3, TypedNodeSet({30}), 1000), BudgetError);
}
