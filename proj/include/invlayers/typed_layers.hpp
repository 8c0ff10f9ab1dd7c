#pragma once

// Learnable order-1 layers for graphs with typed nodes, and the invariant
// network F = M ∘ h ∘ L_D ∘ σ ∘ ... ∘ σ ∘ L_1 built from them.

#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "invlayers/permgroup.hpp"

namespace invlayers::layers {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using perm::Permutation;
using perm::TypedNodeSet;

// L(x) = sum_i w_i 1_{K_i}^T x.
class InvariantPool {
 public:
  InvariantPool(TypedNodeSet nodes, VectorXd weights);

  const TypedNodeSet& nodes() const { return nodes_; }
  const VectorXd& weights() const { return w_; }
  double forward(const VectorXd& x) const;

 private:
  TypedNodeSet nodes_;
  VectorXd w_;
};

// L(x) = sum_{i,j} W(i,j) (1_{K_i}^T x) 1_{K_j} + sum_i v_i I_{K_i} x
//        [+ sum_j c_j 1_{K_j}].
class EquivariantMap {
 public:
  EquivariantMap(TypedNodeSet nodes, MatrixXd mix, VectorXd diag,
                 std::optional<VectorXd> bias = std::nullopt);

  static EquivariantMap random(const TypedNodeSet& nodes, std::mt19937_64& rng,
                               bool with_bias = false);

  const TypedNodeSet& nodes() const { return nodes_; }
  const MatrixXd& mix() const { return W_; }
  const VectorXd& diag() const { return v_; }
  const std::optional<VectorXd>& bias() const { return c_; }

  VectorXd forward(const VectorXd& x) const;
  // J(r, c) = W(type c, type r) + [r == c] v(type r). Bias does not enter.
  MatrixXd jacobian() const;

 private:
  TypedNodeSet nodes_;
  MatrixXd W_;
  VectorXd v_;
  std::optional<VectorXd> c_;
};

// Max |J_analytic - J_central| over entries, central differences of `op`.
double finite_diff_check(const std::function<VectorXd(const VectorXd&)>& op,
                         const MatrixXd& analytic, const VectorXd& x,
                         double step);
double finite_diff_check(const EquivariantMap& map, const VectorXd& x,
                         double step);

enum class Activation { kReLU, kSigmoid };

double activate(Activation a, double v);

// Channel-mixing equivariant layer: output channel o is
// sum_c maps[c * out + o](x_c).
class EquivariantLayer {
 public:
  EquivariantLayer(int in_channels, int out_channels,
                   std::vector<EquivariantMap> maps);
  static EquivariantLayer random(const TypedNodeSet& nodes, int in_channels,
                                 int out_channels, std::mt19937_64& rng,
                                 bool with_bias = false);

  int in_channels() const { return in_; }
  int out_channels() const { return out_; }
  const EquivariantMap& map(int in_channel, int out_channel) const {
    return maps_[static_cast<std::size_t>(in_channel * out_ + out_channel)];
  }
  // x: n x in_channels.
  MatrixXd forward(const MatrixXd& x) const;

 private:
  int in_;
  int out_;
  std::vector<EquivariantMap> maps_;
};

struct DenseLayer {
  MatrixXd weight;  // out x in
  VectorXd bias;    // out
};

class InvariantNetwork {
 public:
  InvariantNetwork(TypedNodeSet nodes, std::vector<EquivariantLayer> stack,
                   Activation activation, std::vector<InvariantPool> pools,
                   std::vector<DenseLayer> head);

  // Random weights in [-1, 1]. widths = (a_1, ..., a_{D+1}); head_widths are
  // the hidden and output sizes of M.
  static InvariantNetwork random(const TypedNodeSet& nodes,
                                 const std::vector<int>& widths,
                                 const std::vector<int>& head_widths,
                                 Activation activation, std::mt19937_64& rng);

  const TypedNodeSet& nodes() const { return nodes_; }
  // x: n x a_1.
  VectorXd forward(const MatrixXd& x) const;

 private:
  TypedNodeSet nodes_;
  std::vector<EquivariantLayer> stack_;
  Activation activation_;
  std::vector<InvariantPool> pools_;
  std::vector<DenseLayer> head_;
};

// (P x)_{P(i)} = x_i, for vectors and for the rows of n x a feature matrices.
VectorXd permute(const Permutation& p, const VectorXd& x);
MatrixXd permute_rows(const Permutation& p, const MatrixXd& x);

// JSON weight files: {"type_sizes": [...], "W": [row-major m*m],
// "v": [m], "c": [m] (optional)}.
EquivariantMap load_equivariant_map(std::istream& in);
void save_equivariant_map(std::ostream& out, const EquivariantMap& map);

}  // namespace invlayers::layers
