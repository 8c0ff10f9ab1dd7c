#include <doctest.h>

#include <random>
#include <sstream>

#include "invlayers/errors.hpp"
#include "invlayers/exact_rank.hpp"
#include "invlayers/permgroup.hpp"
#include "invlayers/tensor_basis.hpp"
#include "invlayers/typed_layers.hpp"

using namespace invlayers;
using namespace invlayers::layers;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

MatrixXd mat(int rows, int cols, std::initializer_list<double> v) {
  MatrixXd out(rows, cols);
  auto it = v.begin();
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) out(r, c) = *it++;
  }
  return out;
}

std::vector<int> random_sizes(std::mt19937_64& rng, int max_n, int max_m) {
  const int m = 1 + static_cast<int>(rng() % max_m);
  std::vector<int> sizes;
  int left = max_n;
  for (int t = 0; t < m && left > 0; ++t) {
    const int s = 1 + static_cast<int>(rng() % std::min(left, 15));
    sizes.push_back(s);
    left -= s;
  }
  return sizes;
}

VectorXd gaussian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  VectorXd v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

// Direct evaluation of sum_ij W_ij (1_Ki^T x) 1_Kj + sum_i v_i I_Ki x + c.
VectorXd direct_formula(const TypedNodeSet& nodes, const MatrixXd& W, const VectorXd& v,
                        const VectorXd* c, const VectorXd& x) {
  const int n = nodes.n();
  VectorXd y = VectorXd::Zero(n);
  for (int i = 0; i < nodes.m(); ++i) {
    double sum_i = 0;
    for (int node : nodes.block(i)) sum_i += x(node);
    for (int j = 0; j < nodes.m(); ++j) {
      for (int node : nodes.block(j)) y(node) += W(i, j) * sum_i;
    }
    for (int node : nodes.block(i)) y(node) += v(i) * x(node);
  }
  if (c) {
    for (int j = 0; j < nodes.m(); ++j) {
      for (int node : nodes.block(j)) y(node) += (*c)(j);
    }
  }
  return y;
}

}  // namespace

TEST_CASE("invariant pool") {
  const TypedNodeSet one({4});
  CHECK(InvariantPool(one, vec({1})).forward(vec({1, 2, 3, 4})) == 10);
  const TypedNodeSet two({2, 3});
  CHECK(InvariantPool(two, vec({0.5, 2})).forward(vec({0, 0, 1, 1, 1})) == 6);
  CHECK(InvariantPool(TypedNodeSet({2, 1}), vec({2, -1})).forward(vec({1, 2, 3})) == 3);
  CHECK_THROWS_AS(InvariantPool(two, vec({1})), ValidationError);
  CHECK_THROWS_AS(InvariantPool(two, vec({1, 1})).forward(vec({1, 2})), ValidationError);
}

TEST_CASE("equivariant map formula") {
  const TypedNodeSet one({3});
  const EquivariantMap deepsets(one, mat(1, 1, {2}), vec({5}));
  const auto x = vec({1, 2, 3});
  CHECK(deepsets.forward(x) == vec({17, 22, 27}));
  const EquivariantMap ones(TypedNodeSet({2, 1}), MatrixXd::Ones(2, 2), VectorXd::Zero(2));
  CHECK(ones.forward(vec({1, 2, 3})) == vec({6, 6, 6}));
  const EquivariantMap biased(TypedNodeSet({2, 1}), MatrixXd::Ones(2, 2), vec({1, 1}),
                              vec({0.5, -1}));
  CHECK(biased.forward(VectorXd::Zero(3)) == vec({0.5, 0.5, -1}));
  CHECK(ones.forward(VectorXd::Zero(3)) == VectorXd::Zero(3));
  CHECK_THROWS_AS(ones.forward(vec({1, 2})), ValidationError);
  CHECK_THROWS_AS(EquivariantMap(one, MatrixXd::Ones(2, 2), vec({1})), ValidationError);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const TypedNodeSet nodes(random_sizes(rng, 12, 4));
    const auto map = EquivariantMap::random(nodes, rng, trial % 2 == 0);
    const auto xin = gaussian(rng, nodes.n());
    const VectorXd* c = map.bias() ? &*map.bias() : nullptr;
    CHECK((map.forward(xin) - direct_formula(nodes, map.mix(), map.diag(), c, xin))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
  }
}

TEST_CASE("equivariance under typed generators") {
  std::mt19937_64 rng(2);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const TypedNodeSet nodes(random_sizes(rng, 50, 4));
    const auto group = perm::young_generators(nodes);
    const auto map = EquivariantMap::random(nodes, rng, true);
    const VectorXd w = gaussian(rng, nodes.m());
    const InvariantPool pool(nodes, w);
    const auto x = gaussian(rng, nodes.n());
    for (const auto& p : group.generators) {
      const auto px = permute(p, x);
      worst = std::max(worst, (map.forward(px) - permute(p, map.forward(x))).cwiseAbs().maxCoeff());
      worst = std::max(worst, std::abs(pool.forward(px) - pool.forward(x)));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("network invariance") {
  std::mt19937_64 rng(3);
  const TypedNodeSet nodes({3, 2});
  const auto elements = perm::group_closure(perm::young_generators(nodes), 100);
  REQUIRE(elements.size() == 12);
  for (auto act : {Activation::kReLU, Activation::kSigmoid}) {
    const auto net = InvariantNetwork::random(nodes, {1, 4, 4}, {3, 1}, act, rng);
    MatrixXd x(5, 1);
    x.col(0) = gaussian(rng, 5);
    const auto y = net.forward(x);
    for (const auto& g : elements) {
      CHECK((net.forward(permute_rows(g, x)) - y).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("network edge cases") {
  const TypedNodeSet nodes({2, 2});
  const InvariantPool pool(nodes, vec({1, -2}));
  const InvariantNetwork bare(nodes, {}, Activation::kReLU, {pool},
                              {DenseLayer{MatrixXd::Identity(1, 1), VectorXd::Zero(1)}});
  MatrixXd x(4, 1);
  x.col(0) = vec({1, 2, 3, 4});
  CHECK(bare.forward(x)(0) == pool.forward(x.col(0)));

  std::mt19937_64 rng(4);
  const auto layer = EquivariantLayer::random(nodes, 1, 2, rng);
  std::vector<EquivariantMap> zero_maps;
  for (int i = 0; i < 2; ++i) zero_maps.emplace_back(nodes, MatrixXd::Zero(2, 2), VectorXd::Zero(2));
  const EquivariantLayer zero(1, 2, zero_maps);
  const DenseLayer head{mat(1, 2, {1, 1}), vec({0.25})};
  const InvariantNetwork constant(nodes, {zero}, Activation::kSigmoid,
                                  {InvariantPool(nodes, vec({1, 1})), InvariantPool(nodes, vec({3, 1}))},
                                  {head});
  CHECK(constant.forward(x)(0) == 0.25);

  // Channel mismatch between layers names the offending layer.
  const auto second = EquivariantLayer::random(nodes, 3, 1, rng);
  try {
    InvariantNetwork(nodes, {layer, second}, Activation::kReLU, {pool}, {});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("layer 2") != std::string::npos);
  }
  const DenseLayer bad_head{MatrixXd::Ones(1, 3), VectorXd::Zero(1)};
  CHECK_THROWS_AS(InvariantNetwork(nodes, {}, Activation::kReLU, {pool}, {bad_head}),
                  ValidationError);
  CHECK_THROWS_AS(bare.forward(MatrixXd::Zero(3, 1)), ValidationError);
}

TEST_CASE("jacobian") {
  const EquivariantMap m1(TypedNodeSet({4}), mat(1, 1, {2}), vec({-3}));
  CHECK(m1.jacobian() == 2 * MatrixXd::Ones(4, 4) - 3 * MatrixXd::Identity(4, 4));
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const TypedNodeSet nodes(random_sizes(rng, 20, 4));
    const auto map = EquivariantMap::random(nodes, rng, true);
    CHECK(finite_diff_check(map, gaussian(rng, nodes.n()), 1e-5) <= 1e-6);
    const auto J = map.jacobian();
    // Off-diagonal entries depend only on the pair of types.
    for (int r = 0; r < nodes.n(); ++r) {
      for (int c = 0; c < nodes.n(); ++c) {
        if (r == c) continue;
        CHECK(J(r, c) == map.mix()(nodes.type_of(c), nodes.type_of(r)));
      }
    }
  }
  // Finite differences of a non-linear op against a wrong Jacobian are caught.
  const auto op = [](const VectorXd& x) -> VectorXd { return x.array().square(); };
  CHECK(finite_diff_check(op, MatrixXd::Zero(2, 2), vec({1, 1}), 1e-5) > 1.0);
}

TEST_CASE("layer span equals the k=d=1 basis span (m=2)") {
  const TypedNodeSet nodes({3, 2});
  const int n = nodes.n();
  const auto eb = basis::equivariant_basis(1, 1, nodes);
  REQUIRE(eb.basis.elements.size() == 6);
  // Parameters (W00, W01, W10, W11, v0, v1) -> coefficients on the basis.
  std::vector<std::vector<linalg::BigInt>> system;
  for (int param = 0; param < 6; ++param) {
    MatrixXd W = MatrixXd::Zero(2, 2);
    VectorXd v = VectorXd::Zero(2);
    if (param < 4) {
      W(param / 2, param % 2) = 1;
    } else {
      v(param - 4) = 1;
    }
    const auto J = EquivariantMap(nodes, W, v).jacobian();
    std::vector<linalg::BigInt> coeffs;
    MatrixXd rebuilt = MatrixXd::Zero(n, n);
    for (const auto& e : eb.basis.elements) {
      // Support tuple (i, j) maps input i to output j, i.e. J(j, i).
      const auto t0 = e.tensor.tuple(0);
      const double value = J(t0[1], t0[0]);
      CHECK(value == std::round(value));
      coeffs.emplace_back(static_cast<long long>(value));
      for (std::size_t s = 0; s < e.tensor.size(); ++s) {
        const auto t = e.tensor.tuple(s);
        rebuilt(t[1], t[0]) += value;
      }
    }
    CHECK(rebuilt == J);
    system.push_back(coeffs);
  }
  // Full rank: every basis matrix is realized by some weight setting.
  CHECK(linalg::bareiss_rank(system) == 6);
}

TEST_CASE("weight files") {
  std::mt19937_64 rng(6);
  const auto map = EquivariantMap::random(TypedNodeSet({2, 3, 1}), rng, true);
  std::stringstream ss;
  save_equivariant_map(ss, map);
  const auto back = load_equivariant_map(ss);
  CHECK(back.nodes() == map.nodes());
  CHECK(back.mix() == map.mix());
  CHECK(back.diag() == map.diag());
  REQUIRE(back.bias());
  CHECK(*back.bias() == *map.bias());
  std::stringstream bad(R"({"type_sizes":[2,1],"W":[1,2,3],"v":[0,0]})");
  CHECK_THROWS_AS(load_equivariant_map(bad), ValidationError);
  std::stringstream garbage("not json");
  CHECK_THROWS_AS(load_equivariant_map(garbage), ParseError);
}
