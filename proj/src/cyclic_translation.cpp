#include "invlayers/cyclic_translation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "invlayers/errors.hpp"

namespace invlayers::cyclic {

BigInt cyclic_invariant_dim(int n, int k) {
  if (n < 1 || k < 1) throw ValidationError("cyclic_invariant_dim needs n, k >= 1");
  return boost::multiprecision::pow(BigInt(n), static_cast<unsigned>(k - 1));
}

BigInt translation_invariant_dim(int d, int k) {
  if (d < 1 || k < 1) throw ValidationError("translation_invariant_dim needs d, k >= 1");
  return boost::multiprecision::pow(BigInt(d), static_cast<unsigned>(2 * k - 2));
}

std::vector<SparseIndicatorTensor> cyclic_basis(int n, int k,
                                                std::uint64_t budget) {
  if (n < 1 || k < 1) throw ValidationError("cyclic_basis needs n, k >= 1");
  const std::uint64_t total = basis::index_space_size(n, k, budget);
  const auto un = static_cast<std::uint64_t>(n);
  // Shifting every digit by one maps idx -> idx + (11..1)_n with per-digit
  // wraparound; compute it digitwise.
  auto shift = [&](std::uint64_t idx) {
    std::uint64_t out = 0, scale = 1;
    for (int s = 0; s < k; ++s) {
      out += scale * ((idx % un + 1) % un);
      idx /= un;
      scale *= un;
    }
    return out;
  };
  std::vector<bool> seen(total, false);
  std::vector<SparseIndicatorTensor> out;
  for (std::uint64_t start = 0; start < total; ++start) {
    if (seen[start]) continue;
    std::vector<std::uint64_t> orbit;
    for (std::uint64_t idx = start; !seen[idx]; idx = shift(idx)) {
      seen[idx] = true;
      orbit.push_back(idx);
    }
    out.emplace_back(n, k, std::move(orbit));
  }
  return out;
}

GridImage::GridImage(int d, std::vector<double> pixels)
    : d_(d), pixels_(std::move(pixels)) {
  if (d_ < 1 || pixels_.size() != static_cast<std::size_t>(d_) * d_) {
    throw ValidationError("image must be d x d with d >= 1");
  }
}

std::complex<double> root_of_unity(int d, long long e) {
  const long long r = ((e % d) + d) % d;
  // Exact values where 4r/d is an integer.
  if ((4 * r) % d == 0) {
    switch ((4 * r) / d) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      case 3: return {0.0, -1.0};
    }
  }
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / d;
  return {std::cos(angle), std::sin(angle)};
}

namespace {

std::vector<std::complex<double>> root_table(int d) {
  std::vector<std::complex<double>> table(static_cast<std::size_t>(d));
  for (int e = 0; e < d; ++e) table[e] = root_of_unity(d, e);
  return table;
}

}  // namespace

SpectralImage dft2(const GridImage& x) {
  const int d = x.d();
  const auto w = root_table(d);
  SpectralImage z(d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      std::complex<double> sum = 0.0;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) sum += x.at(i, j) * w[(a * i + b * j) % d];
      }
      z.at(a, b) = sum;
    }
  }
  return z;
}

std::vector<std::complex<double>> idft2_complex(const SpectralImage& z) {
  const int d = z.d();
  const auto w = root_table(d);
  std::vector<std::complex<double>> x(static_cast<std::size_t>(d) * d);
  const double scale = 1.0 / (static_cast<double>(d) * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      std::complex<double> sum = 0.0;
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          sum += z.at(a, b) * w[(d - (a * i + b * j) % d) % d];
        }
      }
      x[static_cast<std::size_t>(i) * d + j] = sum * scale;
    }
  }
  return x;
}

GridImage idft2(const SpectralImage& z) {
  const auto values = idft2_complex(z);
  std::vector<double> real(values.size());
  std::transform(values.begin(), values.end(), real.begin(),
                 [](const std::complex<double>& c) { return c.real(); });
  return GridImage(z.d(), std::move(real));
}

GridImage translate(const GridImage& x, int p, int q) {
  const int d = x.d();
  GridImage y(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      y.at(((i + p) % d + d) % d, ((j + q) % d + d) % d) = x.at(i, j);
    }
  }
  return y;
}

namespace {

GridImage random_image(int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  GridImage x(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) x.at(i, j) = dist(rng);
  }
  return x;
}

}  // namespace

double verify_diagonalization(int d, int trials, std::uint64_t seed) {
  if (d < 1) throw ValidationError("d must be >= 1");
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const GridImage x = random_image(d, rng);
    const SpectralImage z = dft2(x);
    for (int p = 0; p < d; ++p) {
      for (int q = 0; q < d; ++q) {
        const SpectralImage shifted = dft2(translate(x, p, q));
        for (int a = 0; a < d; ++a) {
          for (int b = 0; b < d; ++b) {
            const auto expected =
                root_of_unity(d, static_cast<long long>(p) * a + static_cast<long long>(q) * b) *
                z.at(a, b);
            worst = std::max(worst, std::abs(shifted.at(a, b) - expected));
          }
        }
      }
    }
  }
  return worst;
}

double round_trip_error(int d, int trials, std::uint64_t seed) {
  if (d < 1) throw ValidationError("d must be >= 1");
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const GridImage x = random_image(d, rng);
    const auto back = idft2_complex(dft2(x));
    for (std::size_t i = 0; i < back.size(); ++i) {
      worst = std::max(worst, std::abs(back[i] - x.pixels()[i]));
    }
  }
  return worst;
}

GridImage read_grid(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ParseError("empty image", 0);
  std::vector<std::vector<double>> rows;
  if (text[first] == '[') {
    try {
      rows = nlohmann::json::parse(text).get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& err) {
      throw ParseError(std::string("image JSON: ") + err.what(), 0);
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::vector<double> row;
      std::istringstream cells(line);
      std::string cell;
      while (std::getline(cells, cell, ',')) {
        try {
          std::size_t used = 0;
          row.push_back(std::stod(cell, &used));
          if (cell.find_first_not_of(" \t\r", used) != std::string::npos) {
            throw std::invalid_argument(cell);
          }
        } catch (const std::exception&) {
          throw ParseError("line " + std::to_string(lineno) + ": bad number '" + cell + "'",
                           lineno);
        }
      }
      rows.push_back(std::move(row));
    }
  }
  const int d = static_cast<int>(rows.size());
  std::vector<double> pixels;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != d) {
      throw ParseError("image is not square (" + std::to_string(d) + " rows, a row has " +
                           std::to_string(row.size()) + " values)",
                       0);
    }
    pixels.insert(pixels.end(), row.begin(), row.end());
  }
  return GridImage(d, std::move(pixels));
}

void write_spectral_json(std::ostream& out, const SpectralImage& z) {
  nlohmann::json rows = nlohmann::json::array();
  for (int a = 0; a < z.d(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (int b = 0; b < z.d(); ++b) row.push_back({z.at(a, b).real(), z.at(a, b).imag()});
    rows.push_back(std::move(row));
  }
  out << nlohmann::json{{"d", z.d()}, {"coeffs", rows}}.dump() << '\n';
}

}  // namespace invlayers::cyclic
