#include "invlayers/tensor_basis.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "invlayers/errors.hpp"

namespace invlayers::basis {

using nlohmann::json;

std::uint64_t index_space_size(int n, int k, std::uint64_t budget) {
  if (n < 0 || k < 0) throw ValidationError("n and k must be >= 0");
  std::uint64_t total = 1;
  for (int i = 0; i < k; ++i) {
    if (n != 0 && total > budget / static_cast<std::uint64_t>(n)) {
      throw BudgetError("n^k = " + std::to_string(n) + "^" + std::to_string(k) +
                        " exceeds tuple budget " + std::to_string(budget));
    }
    total *= static_cast<std::uint64_t>(n);
  }
  return total;
}

SparseIndicatorTensor::SparseIndicatorTensor(
    int n, int k, std::vector<std::uint64_t> linear_support)
    : n_(n), k_(k), support_(std::move(linear_support)) {
  std::sort(support_.begin(), support_.end());
  support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
  if (!support_.empty()) {
    const auto total = index_space_size(n_, k_, UINT64_MAX);
    if (support_.back() >= total) throw ValidationError("support index out of range");
  }
}

SparseIndicatorTensor SparseIndicatorTensor::from_tuples(
    int n, int k, const std::vector<std::vector<int>>& tuples) {
  SparseIndicatorTensor t(n, k, {});
  std::vector<std::uint64_t> linear;
  linear.reserve(tuples.size());
  for (const auto& tup : tuples) linear.push_back(t.linear_index(tup));
  return SparseIndicatorTensor(n, k, std::move(linear));
}

std::vector<int> SparseIndicatorTensor::tuple(std::size_t position) const {
  std::vector<int> out(static_cast<std::size_t>(k_));
  std::uint64_t idx = support_[position];
  for (int s = k_ - 1; s >= 0; --s) {
    out[s] = static_cast<int>(idx % static_cast<std::uint64_t>(n_));
    idx /= static_cast<std::uint64_t>(n_);
  }
  return out;
}

std::uint64_t SparseIndicatorTensor::linear_index(
    std::span<const int> tuple) const {
  if (static_cast<int>(tuple.size()) != k_) {
    throw ValidationError("tuple has " + std::to_string(tuple.size()) +
                          " entries, tensor order is " + std::to_string(k_));
  }
  std::uint64_t idx = 0;
  for (int v : tuple) {
    if (v < 0 || v >= n_) {
      throw ValidationError("tuple entry " + std::to_string(v) +
                            " outside 0.." + std::to_string(n_ - 1));
    }
    idx = idx * static_cast<std::uint64_t>(n_) + static_cast<std::uint64_t>(v);
  }
  return idx;
}

bool SparseIndicatorTensor::contains(std::span<const int> tuple) const {
  return std::binary_search(support_.begin(), support_.end(),
                            linear_index(tuple));
}

namespace {

// Applies p to every digit of a base-n linear index of length k.
std::uint64_t permute_index(std::uint64_t idx, const Permutation& p, int n,
                            int k) {
  std::uint64_t out = 0;
  std::uint64_t scale = 1;
  for (int s = 0; s < k; ++s) {
    const auto digit = static_cast<std::uint32_t>(idx % static_cast<std::uint64_t>(n));
    idx /= static_cast<std::uint64_t>(n);
    out += scale * p(digit);
    scale *= static_cast<std::uint64_t>(n);
  }
  return out;
}

}  // namespace

SparseIndicatorTensor SparseIndicatorTensor::permuted(
    const Permutation& p) const {
  if (p.n() != n_) throw ValidationError("permutation size does not match tensor");
  std::vector<std::uint64_t> out;
  out.reserve(support_.size());
  for (auto idx : support_) out.push_back(permute_index(idx, p, n_, k_));
  return SparseIndicatorTensor(n_, k_, std::move(out));
}

DenseTensor DenseTensor::zeros(int n, int k, std::uint64_t budget) {
  return DenseTensor{n, k, std::vector<double>(index_space_size(n, k, budget), 0.0)};
}

DenseTensor DenseTensor::permuted(const Permutation& p) const {
  if (p.n() != n) throw ValidationError("permutation size does not match tensor");
  DenseTensor out{n, k, std::vector<double>(data.size(), 0.0)};
  for (std::uint64_t idx = 0; idx < data.size(); ++idx) {
    out.data[permute_index(idx, p, n, k)] = data[idx];
  }
  return out;
}

std::size_t TensorBasis::nonempty_count() const {
  return static_cast<std::size_t>(std::count_if(
      elements.begin(), elements.end(),
      [](const BasisElement& e) { return !e.empty(); }));
}

BasisElement build_basis_element(const ColoredPartition& descriptor,
                                 const TypedNodeSet& nodes,
                                 std::uint64_t budget) {
  const int n = nodes.n();
  const int k = descriptor.k();
  if (descriptor.num_types() != nodes.m()) {
    throw ValidationError("descriptor has " +
                          std::to_string(descriptor.num_types()) +
                          " types, node set has " + std::to_string(nodes.m()));
  }
  index_space_size(n, k, budget);

  const auto& partition = descriptor.partition();
  const auto& block_types = descriptor.block_types();
  const int num_blocks = partition.num_blocks();

  // Assign pairwise-distinct nodes of the right type to each block; blocks of
  // different types can never collide since the K_j are disjoint.
  std::vector<std::uint64_t> support;
  std::vector<int> block_node(static_cast<std::size_t>(num_blocks), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  auto emit = [&] {
    std::uint64_t idx = 0;
    for (int s = 0; s < k; ++s) {
      idx = idx * static_cast<std::uint64_t>(n) +
            static_cast<std::uint64_t>(block_node[partition.block_of(s)]);
    }
    support.push_back(idx);
  };
  auto assign = [&](auto&& self, int b) -> void {
    if (b == num_blocks) {
      emit();
      return;
    }
    const int type = block_types[b];
    const int begin = nodes.begin_of(type);
    for (int v = begin; v < begin + nodes.size_of(type); ++v) {
      if (used[v]) continue;
      used[v] = true;
      block_node[b] = v;
      self(self, b + 1);
      used[v] = false;
    }
  };
  assign(assign, 0);
  return BasisElement{descriptor, SparseIndicatorTensor(n, k, std::move(support))};
}

TensorBasis build_full_basis(int k, const TypedNodeSet& nodes,
                             std::uint64_t budget) {
  index_space_size(nodes.n(), k, budget);
  combinat::EnumerationCaps caps;
  caps.max_k = std::max(caps.max_k, k);
  caps.max_m = std::max(caps.max_m, nodes.m());
  TensorBasis out{nodes, k, {}};
  for (const auto& desc : combinat::enumerate_colored_partitions(k, nodes.m(), caps)) {
    out.elements.push_back(build_basis_element(desc, nodes, budget));
  }
  return out;
}

double apply_functional(const BasisElement& element, const DenseTensor& x) {
  const auto& t = element.tensor;
  if (x.n != t.n() || x.k != t.k()) {
    throw ValidationError("tensor shape (n=" + std::to_string(x.n) + ", k=" +
                          std::to_string(x.k) + ") does not match basis (n=" +
                          std::to_string(t.n()) + ", k=" + std::to_string(t.k()) + ")");
  }
  double sum = 0.0;
  for (auto idx : t.support()) sum += x[idx];
  return sum;
}

bool verify_invariance(const SparseIndicatorTensor& tensor,
                       const PermGroupSpec& group) {
  for (const auto& g : group.generators) {
    if (g.n() != tensor.n()) throw ValidationError("generator size does not match tensor");
    if (tensor.permuted(g) != tensor) return false;
  }
  return true;
}

namespace {

std::vector<std::uint64_t> merged_support(const TensorBasis& basis) {
  std::vector<std::uint64_t> all;
  for (const auto& e : basis.elements) {
    all.insert(all.end(), e.tensor.support().begin(), e.tensor.support().end());
  }
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

bool verify_orthogonality(const TensorBasis& basis) {
  const auto all = merged_support(basis);
  return std::adjacent_find(all.begin(), all.end()) == all.end();
}

bool verify_covering(const TensorBasis& basis) {
  auto all = merged_support(basis);
  all.erase(std::unique(all.begin(), all.end()), all.end());
  const auto total = index_space_size(basis.nodes.n(), basis.order, UINT64_MAX);
  return all.size() == total && (all.empty() || all.back() == total - 1);
}

std::vector<double> decompose(const DenseTensor& x, const TensorBasis& basis) {
  std::vector<double> coefficients;
  coefficients.reserve(basis.elements.size());
  for (const auto& e : basis.elements) {
    coefficients.push_back(
        e.empty() ? 0.0
                  : apply_functional(e, x) / static_cast<double>(e.tensor.size()));
  }
  return coefficients;
}

DenseTensor reconstruct(std::span<const double> coefficients,
                        const TensorBasis& basis) {
  if (coefficients.size() != basis.elements.size()) {
    throw ValidationError("one coefficient per basis element required");
  }
  DenseTensor out = DenseTensor::zeros(basis.nodes.n(), basis.order, UINT64_MAX);
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    for (auto idx : basis.elements[i].tensor.support()) out[idx] += coefficients[i];
  }
  return out;
}

EquivariantBasis equivariant_basis(int k, int d, const TypedNodeSet& nodes,
                                   std::uint64_t budget) {
  if (k < 0 || d < 0) throw ValidationError("k and d must be >= 0");
  return EquivariantBasis{k, d, build_full_basis(k + d, nodes, budget)};
}

DenseTensor apply_equivariant(const BasisElement& element, int in_order,
                              const DenseTensor& x) {
  const auto& t = element.tensor;
  const int out_order = t.k() - in_order;
  if (in_order < 0 || out_order < 0 || x.k != in_order || x.n != t.n()) {
    throw ValidationError("input tensor shape does not match the map's input axes");
  }
  DenseTensor y = DenseTensor::zeros(t.n(), out_order, UINT64_MAX);
  const auto out_size = static_cast<std::uint64_t>(y.data.size());
  for (auto idx : t.support()) y[idx % out_size] += x[idx / out_size];
  return y;
}

void serialize_basis(std::ostream& out, const TensorBasis& basis) {
  const int m = basis.nodes.m();
  json header = {{"format", "invlayers-basis"},
                 {"version", 1},
                 {"n", basis.nodes.n()},
                 {"k", basis.order},
                 {"type_sizes", basis.nodes.sizes()},
                 {"count", basis.elements.size()}};
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < basis.elements.size(); ++i) {
    const auto& e = basis.elements[i];
    std::vector<int> axis_types;
    for (int t : e.descriptor.axis_types()) axis_types.push_back(t + 1);
    json gammas = json::array();
    for (int t = 0; t < m; ++t) {
      std::vector<int> rgs;
      const auto gamma = e.descriptor.gamma(t);
      for (auto b : gamma.rgs()) rgs.push_back(b + 1);
      gammas.push_back(rgs);
    }
    json support = json::array();
    for (std::size_t p = 0; p < e.tensor.size(); ++p) {
      std::vector<int> tup = e.tensor.tuple(p);
      for (int& v : tup) ++v;
      support.push_back(tup);
    }
    json record = {{"index", i + 1},
                   {"axis_types", axis_types},
                   {"gammas", gammas},
                   {"empty", e.empty()},
                   {"support", support}};
    out << record.dump() << '\n';
  }
}

namespace {

json parse_line(const std::string& text, std::size_t line) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& err) {
    throw ParseError("line " + std::to_string(line) + ": " + err.what(), line);
  }
}

template <typename T>
T field(const json& obj, const char* name, std::size_t line) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw ParseError("line " + std::to_string(line) + ": missing field '" +
                         name + "'",
                     line);
  }
  try {
    return obj.at(name).get<T>();
  } catch (const json::exception& err) {
    throw ParseError("line " + std::to_string(line) + ": field '" + name +
                         "': " + err.what(),
                     line);
  }
}

}  // namespace

TensorBasis load_basis(std::istream& in, std::uint64_t budget) {
  std::string text;
  std::size_t line = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, text)) {
      ++line;
      if (text.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("empty basis file", 0);
  const json header = parse_line(text, line);
  if (field<std::string>(header, "format", line) != "invlayers-basis") {
    throw ParseError("line " + std::to_string(line) + ": not a basis file", line);
  }
  const auto sizes = field<std::vector<int>>(header, "type_sizes", line);
  const int n = field<int>(header, "n", line);
  const int k = field<int>(header, "k", line);
  const auto count = field<std::size_t>(header, "count", line);
  TensorBasis basis;
  try {
    basis.nodes = TypedNodeSet(sizes);
  } catch (const ValidationError& err) {
    throw ParseError("line " + std::to_string(line) + ": " + err.what(), line);
  }
  if (basis.nodes.n() != n || k < 0) {
    throw ParseError("line " + std::to_string(line) +
                         ": n does not equal the sum of type_sizes",
                     line);
  }
  basis.order = k;
  const int m = basis.nodes.m();

  while (next_line()) {
    const json record = parse_line(text, line);
    const auto axis_types = field<std::vector<int>>(record, "axis_types", line);
    const auto gamma_rgs = field<std::vector<std::vector<int>>>(record, "gammas", line);
    const auto tuples = field<std::vector<std::vector<int>>>(record, "support", line);
    const bool empty = field<bool>(record, "empty", line);
    try {
      if (static_cast<int>(axis_types.size()) != k) {
        throw ValidationError("axis_types length differs from k");
      }
      if (static_cast<int>(gamma_rgs.size()) != m) {
        throw ValidationError("expected one gamma per type");
      }
      std::vector<int> types;
      for (int t : axis_types) types.push_back(t - 1);
      std::vector<combinat::SetPartition> gammas;
      for (const auto& rgs1 : gamma_rgs) {
        std::vector<std::uint8_t> rgs;
        for (int b : rgs1) {
          if (b < 1 || b > 255) throw ValidationError("gamma label out of range");
          rgs.push_back(static_cast<std::uint8_t>(b - 1));
        }
        gammas.push_back(combinat::SetPartition::from_rgs(std::move(rgs)));
      }
      auto desc = ColoredPartition::from_typed(types, gammas, m);
      std::vector<std::vector<int>> zero_based = tuples;
      for (auto& tup : zero_based) {
        for (int& v : tup) --v;
      }
      auto tensor = SparseIndicatorTensor::from_tuples(n, k, zero_based);
      if (tensor.empty() != empty) {
        throw ValidationError("'empty' flag disagrees with support");
      }
      if (build_basis_element(desc, basis.nodes, budget).tensor != tensor) {
        throw ValidationError("support does not match descriptor");
      }
      basis.elements.push_back(BasisElement{std::move(desc), std::move(tensor)});
    } catch (const ValidationError& err) {
      throw ParseError("line " + std::to_string(line) + ": " + err.what(), line);
    }
  }
  if (basis.elements.size() != count) {
    throw ParseError("header count " + std::to_string(count) + " but " +
                         std::to_string(basis.elements.size()) + " records",
                     line);
  }
  return basis;
}

}  // namespace invlayers::basis
