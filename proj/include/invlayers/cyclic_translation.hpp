#pragma once

// Cyclic and translation invariants: dimensions, orbit-indicator bases, and
// the 2-D discrete Fourier change of basis that diagonalizes C_d x C_d.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "invlayers/tensor_basis.hpp"

namespace invlayers::cyclic {

using BigInt = boost::multiprecision::cpp_int;
using basis::SparseIndicatorTensor;

// n^{k-1}.
BigInt cyclic_invariant_dim(int n, int k);
// d^{2k-2}.
BigInt translation_invariant_dim(int d, int k);

// Orbit indicators of C_n acting diagonally on {0..n-1}^k. The action is
// free, so there are n^{k-1} orbits of size n each; ordered by smallest
// member.
std::vector<SparseIndicatorTensor> cyclic_basis(
    int n, int k, std::uint64_t budget = basis::kDefaultTupleBudget);

class GridImage {
 public:
  GridImage() = default;
  explicit GridImage(int d) : d_(d), pixels_(static_cast<std::size_t>(d) * d, 0.0) {}
  GridImage(int d, std::vector<double> pixels);

  int d() const { return d_; }
  double& at(int i, int j) { return pixels_[static_cast<std::size_t>(i) * d_ + j]; }
  double at(int i, int j) const { return pixels_[static_cast<std::size_t>(i) * d_ + j]; }
  const std::vector<double>& pixels() const { return pixels_; }

 private:
  int d_ = 0;
  std::vector<double> pixels_;
};

// z_{a,b}, indices in {0..d-1}^2 with (0,0) the zero frequency.
class SpectralImage {
 public:
  SpectralImage() = default;
  explicit SpectralImage(int d)
      : d_(d), coeffs_(static_cast<std::size_t>(d) * d) {}

  int d() const { return d_; }
  std::complex<double>& at(int a, int b) {
    return coeffs_[static_cast<std::size_t>(a) * d_ + b];
  }
  const std::complex<double>& at(int a, int b) const {
    return coeffs_[static_cast<std::size_t>(a) * d_ + b];
  }
  const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }

 private:
  int d_ = 0;
  std::vector<std::complex<double>> coeffs_;
};

// omega^e with omega = exp(2 pi i / d); quarter-turn values are exact.
std::complex<double> root_of_unity(int d, long long e);

// z_{a,b} = sum_{i,j} x_{i,j} omega^{a i + b j}, 0-based i, j.
SpectralImage dft2(const GridImage& x);
// x_{i,j} = d^{-2} sum_{a,b} z_{a,b} omega^{-(a i + b j)}; real part.
GridImage idft2(const SpectralImage& z);
std::vector<std::complex<double>> idft2_complex(const SpectralImage& z);

// y_{i,j} = x_{i-p, j-q} (indices mod d), so dft2(y)_{a,b} = omega^{pa+qb} z_{a,b}.
GridImage translate(const GridImage& x, int p, int q);

// Max |dft2(translate(x,p,q))_{a,b} - omega^{pa+qb} dft2(x)_{a,b}| over
// `trials` random images and all d^2 translations.
double verify_diagonalization(int d, int trials, std::uint64_t seed);

// Max |idft2(dft2(x)) - x| over `trials` random images.
double round_trip_error(int d, int trials, std::uint64_t seed);

// Images: CSV with d rows of d values, or JSON array of d arrays.
GridImage read_grid(std::istream& in);
// JSON: {"d": d, "coeffs": [[[re, im], ...], ...]} row a, column b.
void write_spectral_json(std::ostream& out, const SpectralImage& z);

}  // namespace invlayers::cyclic
