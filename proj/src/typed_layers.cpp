#include "invlayers/typed_layers.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "invlayers/errors.hpp"

namespace invlayers::layers {

namespace {

VectorXd type_sums(const TypedNodeSet& nodes, const VectorXd& x) {
  VectorXd sums = VectorXd::Zero(nodes.m());
  for (int i = 0; i < nodes.n(); ++i) sums(nodes.type_of(i)) += x(i);
  return sums;
}

void check_length(const TypedNodeSet& nodes, const VectorXd& x) {
  if (x.size() != nodes.n()) {
    throw ValidationError("input has length " + std::to_string(x.size()) +
                          ", expected n=" + std::to_string(nodes.n()));
  }
}

double uniform(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
}

}  // namespace

InvariantPool::InvariantPool(TypedNodeSet nodes, VectorXd weights)
    : nodes_(std::move(nodes)), w_(std::move(weights)) {
  if (w_.size() != nodes_.m()) {
    throw ValidationError("invariant pool needs m=" + std::to_string(nodes_.m()) +
                          " weights, got " + std::to_string(w_.size()));
  }
}

double InvariantPool::forward(const VectorXd& x) const {
  check_length(nodes_, x);
  return w_.dot(type_sums(nodes_, x));
}

EquivariantMap::EquivariantMap(TypedNodeSet nodes, MatrixXd mix, VectorXd diag,
                               std::optional<VectorXd> bias)
    : nodes_(std::move(nodes)),
      W_(std::move(mix)),
      v_(std::move(diag)),
      c_(std::move(bias)) {
  const int m = nodes_.m();
  if (W_.rows() != m || W_.cols() != m) {
    throw ValidationError("W must be " + std::to_string(m) + "x" + std::to_string(m));
  }
  if (v_.size() != m) throw ValidationError("v must have m entries");
  if (c_ && c_->size() != m) throw ValidationError("bias must have m entries");
}

EquivariantMap EquivariantMap::random(const TypedNodeSet& nodes,
                                      std::mt19937_64& rng, bool with_bias) {
  const int m = nodes.m();
  MatrixXd W(m, m);
  VectorXd v(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) W(i, j) = uniform(rng);
  }
  for (int i = 0; i < m; ++i) v(i) = uniform(rng);
  std::optional<VectorXd> c;
  if (with_bias) {
    c = VectorXd(m);
    for (int i = 0; i < m; ++i) (*c)(i) = uniform(rng);
  }
  return EquivariantMap(nodes, std::move(W), std::move(v), std::move(c));
}

VectorXd EquivariantMap::forward(const VectorXd& x) const {
  check_length(nodes_, x);
  // Per-output-type scalar: sum_i W(i, j) (1_{K_i}^T x).
  const VectorXd broadcast = W_.transpose() * type_sums(nodes_, x);
  VectorXd y(nodes_.n());
  for (int r = 0; r < nodes_.n(); ++r) {
    const int t = nodes_.type_of(r);
    y(r) = broadcast(t) + v_(t) * x(r) + (c_ ? (*c_)(t) : 0.0);
  }
  return y;
}

MatrixXd EquivariantMap::jacobian() const {
  const int n = nodes_.n();
  MatrixXd J(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      J(r, c) = W_(nodes_.type_of(c), nodes_.type_of(r));
    }
    J(r, r) += v_(nodes_.type_of(r));
  }
  return J;
}

double finite_diff_check(const std::function<VectorXd(const VectorXd&)>& op,
                         const MatrixXd& analytic, const VectorXd& x,
                         double step) {
  if (analytic.cols() != x.size()) throw ValidationError("Jacobian shape mismatch");
  double worst = 0.0;
  VectorXd probe = x;
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    probe(c) = x(c) + step;
    const VectorXd plus = op(probe);
    probe(c) = x(c) - step;
    const VectorXd minus = op(probe);
    probe(c) = x(c);
    const VectorXd column = (plus - minus) / (2.0 * step);
    if (column.size() != analytic.rows()) throw ValidationError("Jacobian shape mismatch");
    worst = std::max(worst, (column - analytic.col(c)).cwiseAbs().maxCoeff());
  }
  return worst;
}

double finite_diff_check(const EquivariantMap& map, const VectorXd& x,
                         double step) {
  return finite_diff_check([&map](const VectorXd& v) { return map.forward(v); },
                           map.jacobian(), x, step);
}

double activate(Activation a, double v) {
  switch (a) {
    case Activation::kReLU:
      return v > 0.0 ? v : 0.0;
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-v));
  }
  return v;
}

EquivariantLayer::EquivariantLayer(int in_channels, int out_channels,
                                   std::vector<EquivariantMap> maps)
    : in_(in_channels), out_(out_channels), maps_(std::move(maps)) {
  if (in_ < 1 || out_ < 1) throw ValidationError("channel counts must be >= 1");
  if (maps_.size() != static_cast<std::size_t>(in_ * out_)) {
    throw ValidationError("expected in_channels * out_channels maps");
  }
  for (const auto& m : maps_) {
    if (!(m.nodes() == maps_.front().nodes())) {
      throw ValidationError("all channel maps must share one node set");
    }
  }
}

EquivariantLayer EquivariantLayer::random(const TypedNodeSet& nodes,
                                          int in_channels, int out_channels,
                                          std::mt19937_64& rng, bool with_bias) {
  std::vector<EquivariantMap> maps;
  for (int i = 0; i < in_channels * out_channels; ++i) {
    maps.push_back(EquivariantMap::random(nodes, rng, with_bias));
  }
  return EquivariantLayer(in_channels, out_channels, std::move(maps));
}

MatrixXd EquivariantLayer::forward(const MatrixXd& x) const {
  const auto& nodes = maps_.front().nodes();
  if (x.rows() != nodes.n() || x.cols() != in_) {
    throw ValidationError("expected " + std::to_string(nodes.n()) + "x" +
                          std::to_string(in_) + " input, got " +
                          std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
  MatrixXd y = MatrixXd::Zero(nodes.n(), out_);
  for (int c = 0; c < in_; ++c) {
    const VectorXd column = x.col(c);
    for (int o = 0; o < out_; ++o) y.col(o) += map(c, o).forward(column);
  }
  return y;
}

InvariantNetwork::InvariantNetwork(TypedNodeSet nodes,
                                   std::vector<EquivariantLayer> stack,
                                   Activation activation,
                                   std::vector<InvariantPool> pools,
                                   std::vector<DenseLayer> head)
    : nodes_(std::move(nodes)),
      stack_(std::move(stack)),
      activation_(activation),
      pools_(std::move(pools)),
      head_(std::move(head)) {
  for (std::size_t i = 0; i < stack_.size(); ++i) {
    if (!(stack_[i].map(0, 0).nodes() == nodes_)) {
      throw ValidationError("layer " + std::to_string(i + 1) +
                            ": node set differs from the network's");
    }
    if (i > 0 && stack_[i].in_channels() != stack_[i - 1].out_channels()) {
      throw ValidationError("layer " + std::to_string(i + 1) + ": expects " +
                            std::to_string(stack_[i].in_channels()) +
                            " channels, previous layer gives " +
                            std::to_string(stack_[i - 1].out_channels()));
    }
  }
  if (!stack_.empty() &&
      pools_.size() != static_cast<std::size_t>(stack_.back().out_channels())) {
    throw ValidationError("pool: one invariant pool per output channel required");
  }
  for (const auto& p : pools_) {
    if (!(p.nodes() == nodes_)) throw ValidationError("pool: node set differs");
  }
  std::size_t width = pools_.size();
  for (std::size_t i = 0; i < head_.size(); ++i) {
    const auto& d = head_[i];
    if (static_cast<std::size_t>(d.weight.cols()) != width ||
        d.bias.size() != d.weight.rows()) {
      throw ValidationError("head layer " + std::to_string(i + 1) +
                            ": shape incompatible with its input width " +
                            std::to_string(width));
    }
    width = static_cast<std::size_t>(d.weight.rows());
  }
}

InvariantNetwork InvariantNetwork::random(const TypedNodeSet& nodes,
                                          const std::vector<int>& widths,
                                          const std::vector<int>& head_widths,
                                          Activation activation,
                                          std::mt19937_64& rng) {
  if (widths.empty()) throw ValidationError("widths must list at least a_1");
  std::vector<EquivariantLayer> stack;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    stack.push_back(EquivariantLayer::random(nodes, widths[i], widths[i + 1], rng));
  }
  std::vector<InvariantPool> pools;
  for (int c = 0; c < widths.back(); ++c) {
    VectorXd w(nodes.m());
    for (int i = 0; i < nodes.m(); ++i) w(i) = uniform(rng);
    pools.emplace_back(nodes, std::move(w));
  }
  std::vector<DenseLayer> head;
  int in = widths.back();
  for (int out : head_widths) {
    DenseLayer d{MatrixXd(out, in), VectorXd(out)};
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) d.weight(r, c) = uniform(rng);
      d.bias(r) = uniform(rng);
    }
    head.push_back(std::move(d));
    in = out;
  }
  return InvariantNetwork(nodes, std::move(stack), activation, std::move(pools),
                          std::move(head));
}

VectorXd InvariantNetwork::forward(const MatrixXd& x) const {
  const int expected = stack_.empty() ? static_cast<int>(pools_.size())
                                      : stack_.front().in_channels();
  if (x.rows() != nodes_.n() || x.cols() != expected) {
    throw ValidationError("layer 1: expected " + std::to_string(nodes_.n()) + "x" +
                          std::to_string(expected) + " input, got " +
                          std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
  MatrixXd h = x;
  for (std::size_t i = 0; i < stack_.size(); ++i) {
    if (i > 0) h = h.unaryExpr([this](double v) { return activate(activation_, v); });
    h = stack_[i].forward(h);
  }
  VectorXd pooled(static_cast<Eigen::Index>(pools_.size()));
  for (std::size_t c = 0; c < pools_.size(); ++c) {
    pooled(static_cast<Eigen::Index>(c)) = pools_[c].forward(h.col(static_cast<Eigen::Index>(c)));
  }
  VectorXd out = pooled;
  for (std::size_t i = 0; i < head_.size(); ++i) {
    if (i > 0) out = out.unaryExpr([this](double v) { return activate(activation_, v); });
    out = head_[i].weight * out + head_[i].bias;
  }
  return out;
}

VectorXd permute(const Permutation& p, const VectorXd& x) {
  if (x.size() != p.n()) throw ValidationError("permutation size does not match vector");
  VectorXd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y(p(static_cast<std::uint32_t>(i))) = x(i);
  return y;
}

MatrixXd permute_rows(const Permutation& p, const MatrixXd& x) {
  if (x.rows() != p.n()) throw ValidationError("permutation size does not match rows");
  MatrixXd y(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    y.row(p(static_cast<std::uint32_t>(i))) = x.row(i);
  }
  return y;
}

EquivariantMap load_equivariant_map(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(std::string("weights: ") + err.what(), 0);
  }
  try {
    TypedNodeSet nodes(doc.at("type_sizes").get<std::vector<int>>());
    const int m = nodes.m();
    const auto flat = doc.at("W").get<std::vector<double>>();
    if (flat.size() != static_cast<std::size_t>(m * m)) {
      throw ValidationError("W must hold m*m = " + std::to_string(m * m) + " entries");
    }
    MatrixXd W(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) W(i, j) = flat[static_cast<std::size_t>(i * m + j)];
    }
    const auto v = doc.at("v").get<std::vector<double>>();
    std::optional<VectorXd> c;
    if (doc.contains("c") && !doc.at("c").is_null()) {
      const auto cv = doc.at("c").get<std::vector<double>>();
      c = Eigen::Map<const VectorXd>(cv.data(), static_cast<Eigen::Index>(cv.size()));
    }
    return EquivariantMap(std::move(nodes), std::move(W),
                          Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())),
                          std::move(c));
  } catch (const nlohmann::json::exception& err) {
    throw ValidationError(std::string("weights: ") + err.what());
  }
}

void save_equivariant_map(std::ostream& out, const EquivariantMap& map) {
  const int m = map.nodes().m();
  std::vector<double> flat;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) flat.push_back(map.mix()(i, j));
  }
  nlohmann::json doc = {{"type_sizes", map.nodes().sizes()},
                        {"W", flat},
                        {"v", std::vector<double>(map.diag().data(), map.diag().data() + m)}};
  if (map.bias()) {
    doc["c"] = std::vector<double>(map.bias()->data(), map.bias()->data() + m);
  }
  out << doc.dump(2) << '\n';
}

}  // namespace invlayers::layers
