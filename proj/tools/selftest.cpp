#include "selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <vector>

#include "invlayers/combinat.hpp"
#include "invlayers/cyclic_translation.hpp"
#include "invlayers/graph.hpp"
#include "invlayers/invariant_ring.hpp"
#include "invlayers/permgroup.hpp"
#include "invlayers/tensor_basis.hpp"
#include "invlayers/typed_layers.hpp"
#include "invlayers/zero_sum.hpp"

namespace invlayers::tool {
namespace {

struct Suite {
  std::ostream& out;
  int failed = 0;
  int passed = 0;

  void check(const std::string& name, const std::function<bool()>& body) {
    bool ok = false;
    try {
      ok = body();
    } catch (const std::exception& e) {
      out << "  error: " << e.what() << '\n';
    }
    out << (ok ? "ok   " : "FAIL ") << name << '\n';
    (ok ? passed : failed)++;
  }
};

std::vector<std::vector<int>> small_size_vectors(int max_m, int lo, int hi) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void()> rec = [&] {
    if (!cur.empty()) out.push_back(cur);
    if (static_cast<int>(cur.size()) == max_m) return;
    for (int s = lo; s <= hi; ++s) {
      cur.push_back(s);
      rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

void combinat_suite(Suite& s) {
  using namespace combinat;
  s.check("colored partition counts match gen_bell and EGF power (k<=5, m<=3)", [] {
    std::vector<BigInt> bells;
    for (int k = 0; k <= 5; ++k) bells.push_back(bell(k));
    for (int m = 1; m <= 3; ++m) {
      const auto egf = egf_power_coeffs(bells, m);
      for (int k = 0; k <= 5; ++k) {
        const BigInt count = enumerate_colored_partitions(k, m).size();
        if (count != gen_bell(m, k) || egf[k] != count) return false;
      }
    }
    return true;
  });
  s.check("set partition counts match bell (k<=6)", [] {
    for (int k = 0; k <= 6; ++k) {
      if (BigInt(enumerate_set_partitions(k).size()) != bell(k)) return false;
    }
    return true;
  });
}

void permgroup_suite(Suite& s) {
  s.check("tuple orbits equal Burnside count for Young groups", [] {
    for (const auto& sizes : small_size_vectors(2, 1, 3)) {
      const auto group = perm::young_generators(perm::TypedNodeSet(sizes));
      for (int k = 1; k <= 3; ++k) {
        if (perm::BigInt(perm::orbit_count_on_tuples(group, k, 1'000'000)) !=
            perm::burnside_count(group, k, 10'000)) {
          return false;
        }
      }
    }
    return true;
  });
}

void basis_suite(Suite& s, std::uint64_t seed) {
  using namespace basis;
  s.check("basis is invariant, disjoint and covering (k<=3, m<=2)", [] {
    for (const auto& sizes : small_size_vectors(2, 1, 3)) {
      const TypedNodeSet nodes(sizes);
      const auto group = perm::young_generators(nodes);
      for (int k = 1; k <= 3; ++k) {
        const auto b = build_full_basis(k, nodes);
        if (!verify_orthogonality(b) || !verify_covering(b)) return false;
        for (const auto& e : b.elements) {
          if (!verify_invariance(e.tensor, group)) return false;
        }
      }
    }
    return true;
  });
  s.check("decompose/reconstruct is exact on invariant tensors", [seed] {
    const TypedNodeSet nodes({3, 2});
    const auto b = build_full_basis(2, nodes);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> c(b.elements.size());
    for (auto& v : c) v = u(rng);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (b.elements[i].empty()) c[i] = 0;
    }
    const auto x = reconstruct(c, b);
    const auto back = decompose(x, b);
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (std::abs(back[i] - c[i]) > 1e-12) return false;
    }
    return true;
  });
}

void layers_suite(Suite& s, std::uint64_t seed) {
  using namespace layers;
  s.check("equivariant maps commute with typed generators", [seed] {
    std::mt19937_64 rng(seed);
    const TypedNodeSet nodes({3, 1, 4});
    const auto group = perm::young_generators(nodes);
    std::normal_distribution<double> g;
    for (int t = 0; t < 10; ++t) {
      const auto map = EquivariantMap::random(nodes, rng, true);
      VectorXd x(nodes.n());
      for (auto& v : x) v = g(rng);
      for (const auto& p : group.generators) {
        if ((map.forward(permute(p, x)) - permute(p, map.forward(x))).cwiseAbs().maxCoeff() >
            1e-12) {
          return false;
        }
      }
    }
    return true;
  });
  s.check("invariant network is invariant under typed generators", [seed] {
    std::mt19937_64 rng(seed + 1);
    const TypedNodeSet nodes({2, 3});
    const auto net = InvariantNetwork::random(nodes, {2, 3, 2}, {4, 1}, Activation::kSigmoid, rng);
    std::normal_distribution<double> g;
    MatrixXd x(nodes.n(), 2);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    const auto y = net.forward(x);
    for (const auto& p : perm::young_generators(nodes).generators) {
      if ((net.forward(permute_rows(p, x)) - y).cwiseAbs().maxCoeff() > 1e-12) return false;
    }
    return true;
  });
  s.check("analytic Jacobian matches central differences", [seed] {
    std::mt19937_64 rng(seed + 2);
    const TypedNodeSet nodes({2, 2, 1});
    const auto map = EquivariantMap::random(nodes, rng, true);
    VectorXd x = VectorXd::LinSpaced(nodes.n(), -1, 1);
    return finite_diff_check(map, x, 1e-5) <= 1e-6;
  });
}

void cyclic_suite(Suite& s, std::uint64_t seed) {
  using namespace cyclic;
  s.check("cyclic and translation orbit counts match closed forms", [] {
    for (int n = 1; n <= 4; ++n) {
      for (int k = 1; k <= 3; ++k) {
        if (BigInt(perm::orbit_count_on_tuples(perm::cyclic_generators(n), k, 1'000'000)) !=
            cyclic_invariant_dim(n, k)) {
          return false;
        }
      }
    }
    for (int d = 1; d <= 2; ++d) {
      for (int k = 1; k <= 3; ++k) {
        if (BigInt(perm::orbit_count_on_tuples(perm::translation_generators(d), k,
                                               1'000'000)) != translation_invariant_dim(d, k)) {
          return false;
        }
      }
    }
    return true;
  });
  s.check("DFT diagonalizes translations (d<=4)", [seed] {
    for (int d = 1; d <= 4; ++d) {
      if (verify_diagonalization(d, 5, seed) > 1e-9) return false;
      if (round_trip_error(d, 5, seed) > 1e-12) return false;
    }
    return true;
  });
}

void zero_sum_suite(Suite& s, std::uint64_t seed) {
  using namespace zerosum;
  s.check("Davenport constant of C2 x C2 is 3", [] {
    const auto r = davenport_constant(2);
    return r.certified && r.constant == 3 && r.witness.degree() == 2;
  });
  s.check("classical witnesses are zero-sum free (d<=4)", [] {
    for (int d = 1; d <= 4; ++d) {
      if (find_zero_sum_subsequence(classical_zero_sum_free_witness(d))) return false;
    }
    return true;
  });
  s.check("zero-sum monomials decompose into short zero-sum factors", [seed] {
    std::mt19937_64 rng(seed);
    for (int d = 2; d <= 3; ++d) {
      std::uniform_int_distribution<int> el(0, d - 1);
      for (int t = 0; t < 20; ++t) {
        GroupSequence seq(d);
        const int len = 1 + static_cast<int>(rng() % (4 * d));
        for (int i = 0; i < len; ++i) seq.add(el(rng), el(rng));
        const auto [a, b] = seq.sum();
        seq.add(-a, -b);
        GroupSequence total(d);
        for (const auto& f : decompose_invariant_monomial(seq)) {
          if (!is_zero_sum(f) || f.degree() > 2 * d - 1) return false;
          total += f;
        }
        if (!(total == seq)) return false;
      }
    }
    return true;
  });
}

void invring_suite(Suite& s) {
  using namespace invring;
  s.check("Molien coefficients equal orbit counts (graphs n<=4)", [] {
    for (int n = 1; n <= 4; ++n) {
      for (const auto& g : graph::enumerate_graphs(n)) {
        const auto elements = graph::automorphism_group(g);
        const auto coeffs = molien_hilbert_coeffs(elements, n, 5);
        for (int d = 0; d <= 5; ++d) {
          if (coeffs[d] != BigInt(invariant_dim_by_degree(elements, n, d))) return false;
        }
      }
    }
    return true;
  });
  s.check("both bounds hold for every graph with n<=4", [] {
    const auto r = sweep(4, CapPolicy::parse("full"));
    if (r.reports.size() != 18) return false;
    for (const auto& rep : r.reports) {
      if (rep.a_holds != Verdict::kHolds || rep.b_holds != Verdict::kHolds) return false;
    }
    return true;
  });
}

}  // namespace

bool run_selftest(const std::string& subcommand, std::uint64_t seed, std::ostream& out) {
  Suite s{out};
  if (subcommand == "dims") {
    combinat_suite(s);
    permgroup_suite(s);
  } else if (subcommand == "basis") {
    basis_suite(s, seed);
  } else if (subcommand == "layer-apply") {
    layers_suite(s, seed);
  } else if (subcommand == "cyclic-dims" || subcommand == "dft") {
    cyclic_suite(s, seed);
  } else if (subcommand == "davenport" || subcommand == "decompose") {
    zero_sum_suite(s, seed);
  } else if (subcommand == "conjectures") {
    invring_suite(s);
  }
  out << subcommand << " selftest: " << s.passed << " passed, " << s.failed << " failed\n";
  return s.failed == 0;
}

}  // namespace invlayers::tool
