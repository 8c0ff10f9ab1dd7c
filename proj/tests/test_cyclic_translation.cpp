#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include "invlayers/cyclic_translation.hpp"
#include "invlayers/errors.hpp"
#include "invlayers/permgroup.hpp"

using namespace invlayers;
using namespace invlayers::cyclic;
using cd = std::complex<double>;

namespace {

BigInt power(int base, int exp) {
  BigInt r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

GridImage random_image(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  GridImage x(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) x.at(i, j) = u(rng);
  }
  return x;
}

// Direct O(d^4) evaluation with long double angles.
cd naive_coeff(const GridImage& x, int a, int b) {
  const int d = x.d();
  std::complex<long double> z = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const long double angle =
          2.0L * std::numbers::pi_v<long double> * ((a * i + b * j) % d) / d;
      z += static_cast<long double>(x.at(i, j)) * std::polar(1.0L, angle);
    }
  }
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

}  // namespace

TEST_CASE("cyclic dimensions") {
  CHECK(cyclic_invariant_dim(3, 2) == 3);
  CHECK(cyclic_invariant_dim(7, 1) == 1);
  CHECK(cyclic_invariant_dim(4, 3) == 16);
  for (int n = 1; n <= 6; ++n) {
    for (int k = 1; k <= 4; ++k) {
      const auto group = perm::cyclic_generators(n);
      CHECK(BigInt(perm::orbit_count_on_tuples(group, k, 10'000'000)) == cyclic_invariant_dim(n, k));
      CHECK(perm::burnside_count(group, k, 100) == cyclic_invariant_dim(n, k));
    }
  }
  CHECK_THROWS_AS(cyclic_invariant_dim(0, 2), ValidationError);
}

TEST_CASE("translation dimensions") {
  CHECK(translation_invariant_dim(2, 2) == 4);
  CHECK(translation_invariant_dim(5, 1) == 1);
  CHECK(translation_invariant_dim(3, 2) == 9);
  for (int d = 1; d <= 3; ++d) {
    for (int k = 1; k <= 3; ++k) {
      const auto group = perm::translation_generators(d);
      CHECK(BigInt(perm::orbit_count_on_tuples(group, k, 10'000'000)) ==
            translation_invariant_dim(d, k));
      CHECK(perm::burnside_count(group, k, 100) == power(d, 2 * k - 2));
    }
  }
  for (int d = 1; d <= 6; ++d) {
    for (int k = 1; k <= 4; ++k) {
      const auto c = cyclic_invariant_dim(d, k);
      CHECK(translation_invariant_dim(d, k) == c * c);
    }
  }
}

TEST_CASE("cyclic basis") {
  const auto b32 = cyclic_basis(3, 2);
  REQUIRE(b32.size() == 3);
  for (int c = 0; c < 3; ++c) {
    std::vector<std::vector<int>> diag;
    for (int i = 0; i < 3; ++i) diag.push_back({i, (i + c) % 3});
    CHECK(std::find(b32.begin(), b32.end(), basis::SparseIndicatorTensor::from_tuples(3, 2, diag)) !=
          b32.end());
  }
  const auto b21 = cyclic_basis(2, 1);
  REQUIRE(b21.size() == 1);
  CHECK(b21[0] == basis::SparseIndicatorTensor::from_tuples(2, 1, {{0}, {1}}));
  const auto b23 = cyclic_basis(2, 3);
  CHECK(b23.size() == 4);
  for (int n = 1; n <= 5; ++n) {
    for (int k = 1; k <= 4; ++k) {
      const auto b = cyclic_basis(n, k);
      CHECK(BigInt(b.size()) == cyclic_invariant_dim(n, k));
      const auto group = perm::cyclic_generators(n);
      std::vector<std::uint64_t> all;
      for (const auto& t : b) {
        CHECK(t.size() == static_cast<std::size_t>(n));
        CHECK(basis::verify_invariance(t, group));
        all.insert(all.end(), t.support().begin(), t.support().end());
      }
      std::sort(all.begin(), all.end());
      CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
      CHECK(BigInt(all.size()) == power(n, k));
    }
  }
}

TEST_CASE("roots of unity") {
  CHECK(root_of_unity(4, 1) == cd(0, 1));
  CHECK(root_of_unity(4, 2) == cd(-1, 0));
  CHECK(root_of_unity(4, -1) == cd(0, -1));
  CHECK(root_of_unity(2, 1) == cd(-1, 0));
  CHECK(root_of_unity(1, 5) == cd(1, 0));
  for (int d = 1; d <= 9; ++d) CHECK(std::abs(std::pow(root_of_unity(d, 1), d) - cd(1, 0)) < 1e-12);
}

TEST_CASE("dft of simple images") {
  GridImage constant(4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) constant.at(i, j) = 2.5;
  }
  const auto zc = dft2(constant);
  CHECK(std::abs(zc.at(0, 0) - cd(40, 0)) < 1e-12);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (a || b) CHECK(std::abs(zc.at(a, b)) < 1e-12);
    }
  }
  GridImage delta(3);
  delta.at(0, 0) = 1;
  const auto zd = dft2(delta);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) CHECK(std::abs(zd.at(a, b) - cd(1, 0)) < 1e-15);
  }
}

TEST_CASE("dft matches the defining sum") {
  std::mt19937_64 rng(9);
  for (int d = 1; d <= 7; ++d) {
    const auto x = random_image(d, rng);
    const auto z = dft2(x);
    double energy_x = 0, energy_z = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        CHECK(std::abs(z.at(i, j) - naive_coeff(x, i, j)) < 1e-12);
        CHECK(std::abs(z.at((d - i) % d, (d - j) % d) - std::conj(z.at(i, j))) < 1e-12);
        energy_x += x.at(i, j) * x.at(i, j);
        energy_z += std::norm(z.at(i, j));
      }
    }
    CHECK(std::abs(energy_z - d * d * energy_x) < 1e-9);
  }
}

TEST_CASE("translations act diagonally") {
  std::mt19937_64 rng(10);
  const int d = 4;
  const auto x = random_image(d, rng);
  const auto z = dft2(x);
  for (int p = 0; p < d; ++p) {
    for (int q = 0; q < d; ++q) {
      const auto t = translate(x, p, q);
      CHECK(t.at(p % d, q % d) == x.at(0, 0));
      const auto zt = dft2(t);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          const cd factor = std::polar(1.0, 2 * std::numbers::pi * (p * a + q * b) / d);
          CHECK(std::abs(zt.at(a, b) - factor * z.at(a, b)) < 1e-12);
        }
      }
    }
  }
  CHECK(verify_diagonalization(1, 10, 1) == 0);
  CHECK(verify_diagonalization(2, 10, 1) <= 1e-14);
  CHECK(verify_diagonalization(5, 50, 1) <= 1e-9);
}

TEST_CASE("inverse transform") {
  std::mt19937_64 rng(11);
  const auto x = random_image(4, rng);
  const auto back = idft2(dft2(x));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) CHECK(std::abs(back.at(i, j) - x.at(i, j)) <= 1e-12);
  }
  for (int d = 1; d <= 8; ++d) CHECK(round_trip_error(d, 10, 3) <= 1e-12);
}

TEST_CASE("deterministic under a fixed seed") {
  CHECK(verify_diagonalization(6, 5, 42) == verify_diagonalization(6, 5, 42));
}

TEST_CASE("image input") {
  std::stringstream csv("1,2\n3,4\n");
  const auto a = read_grid(csv);
  CHECK(a.d() == 2);
  CHECK(a.at(1, 0) == 3);
  std::stringstream js("[[1, 2], [3, 4]]");
  CHECK(read_grid(js).pixels() == a.pixels());
  std::stringstream ragged("1,2\n3\n");
  CHECK_THROWS_AS(read_grid(ragged), ParseError);
  std::stringstream bad("1,2\n3,x\n");
  try {
    read_grid(bad);
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::stringstream out;
  write_spectral_json(out, dft2(a));
  CHECK(out.str().rfind("{\"coeffs\":[[[10.0,0.0]", 0) == 0);
}
