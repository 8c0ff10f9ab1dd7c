#include "invlayers/combinat.hpp"

#include <algorithm>
#include <string>

#include "invlayers/errors.hpp"

namespace invlayers::combinat {

SetPartition SetPartition::from_rgs(std::vector<std::uint8_t> rgs) {
  int next = 0;
  for (std::size_t i = 0; i < rgs.size(); ++i) {
    if (rgs[i] > next) {
      throw ValidationError("restricted-growth string violated at position " +
                            std::to_string(i));
    }
    if (rgs[i] == next) ++next;
  }
  SetPartition p;
  p.rgs_ = std::move(rgs);
  p.num_blocks_ = next;
  return p;
}

SetPartition SetPartition::from_blocks(
    const std::vector<std::vector<int>>& blocks, int k) {
  std::vector<int> owner(static_cast<std::size_t>(k), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].empty()) throw ValidationError("empty block in partition");
    for (int axis : blocks[b]) {
      if (axis < 0 || axis >= k) {
        throw ValidationError("axis " + std::to_string(axis) +
                              " out of range for k=" + std::to_string(k));
      }
      if (owner[axis] != -1) {
        throw ValidationError("axis " + std::to_string(axis) +
                              " appears in two blocks");
      }
      owner[axis] = static_cast<int>(b);
    }
  }
  // Renumber blocks by first appearance, which yields the canonical RGS.
  std::vector<int> relabel(blocks.size(), -1);
  std::vector<std::uint8_t> rgs(static_cast<std::size_t>(k));
  int next = 0;
  for (int axis = 0; axis < k; ++axis) {
    if (owner[axis] == -1) {
      throw ValidationError("axis " + std::to_string(axis) +
                            " not covered by any block");
    }
    int& r = relabel[owner[axis]];
    if (r == -1) r = next++;
    rgs[axis] = static_cast<std::uint8_t>(r);
  }
  return from_rgs(std::move(rgs));
}

std::vector<std::vector<int>> SetPartition::blocks() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(num_blocks_));
  for (int axis = 0; axis < k(); ++axis) out[rgs_[axis]].push_back(axis);
  return out;
}

ColoredPartition::ColoredPartition(SetPartition partition,
                                   std::vector<int> block_types, int num_types)
    : partition_(std::move(partition)),
      block_types_(std::move(block_types)),
      num_types_(num_types) {
  if (num_types_ < 1) throw ValidationError("number of types must be >= 1");
  if (static_cast<int>(block_types_.size()) != partition_.num_blocks()) {
    throw ValidationError("one type per block required");
  }
  for (int t : block_types_) {
    if (t < 0 || t >= num_types_) {
      throw ValidationError("block type " + std::to_string(t) +
                            " outside 0.." + std::to_string(num_types_ - 1));
    }
  }
}

ColoredPartition ColoredPartition::from_typed(
    const std::vector<int>& axis_types,
    const std::vector<SetPartition>& gammas, int num_types) {
  if (static_cast<int>(gammas.size()) != num_types) {
    throw ValidationError("expected one gamma per type");
  }
  const int k = static_cast<int>(axis_types.size());
  std::vector<std::vector<int>> axes(static_cast<std::size_t>(num_types));
  for (int s = 0; s < k; ++s) {
    const int t = axis_types[s];
    if (t < 0 || t >= num_types) {
      throw ValidationError("axis type " + std::to_string(t) + " out of range");
    }
    axes[t].push_back(s);
  }
  std::vector<std::vector<int>> blocks;
  std::vector<int> types_of_blocks;
  for (int t = 0; t < num_types; ++t) {
    if (gammas[t].k() != static_cast<int>(axes[t].size())) {
      throw ValidationError("gamma for type " + std::to_string(t + 1) +
                            " does not partition exactly T_j");
    }
    for (const auto& local : gammas[t].blocks()) {
      std::vector<int> global;
      for (int pos : local) global.push_back(axes[t][pos]);
      blocks.push_back(std::move(global));
      types_of_blocks.push_back(t);
    }
  }
  SetPartition p = SetPartition::from_blocks(blocks, k);
  // from_blocks renumbers by minimum element; carry the types along.
  std::vector<int> block_types(types_of_blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    block_types[p.block_of(blocks[b].front())] = types_of_blocks[b];
  }
  return ColoredPartition(std::move(p), std::move(block_types), num_types);
}

std::vector<int> ColoredPartition::axis_types() const {
  std::vector<int> out(static_cast<std::size_t>(k()));
  for (int s = 0; s < k(); ++s) out[s] = axis_type(s);
  return out;
}

std::vector<int> ColoredPartition::axes_of_type(int type) const {
  std::vector<int> out;
  for (int s = 0; s < k(); ++s) {
    if (axis_type(s) == type) out.push_back(s);
  }
  return out;
}

SetPartition ColoredPartition::gamma(int type) const {
  const auto axes = axes_of_type(type);
  std::vector<std::vector<int>> local_blocks;
  std::vector<int> block_slot(static_cast<std::size_t>(partition_.num_blocks()),
                              -1);
  for (std::size_t pos = 0; pos < axes.size(); ++pos) {
    const int b = partition_.block_of(axes[pos]);
    if (block_slot[b] == -1) {
      block_slot[b] = static_cast<int>(local_blocks.size());
      local_blocks.emplace_back();
    }
    local_blocks[block_slot[b]].push_back(static_cast<int>(pos));
  }
  return SetPartition::from_blocks(local_blocks,
                                   static_cast<int>(axes.size()));
}

int ColoredPartition::blocks_of_type(int type) const {
  return static_cast<int>(
      std::count(block_types_.begin(), block_types_.end(), type));
}

BigInt stirling2(int k, int j) {
  if (k < 0 || j < 0) throw ValidationError("stirling2 needs k, j >= 0");
  if (j > k) return 0;
  // Row-by-row recurrence S(i,j) = S(i-1,j-1) + j S(i-1,j).
  std::vector<BigInt> row(static_cast<std::size_t>(j) + 1, 0);
  row[0] = 1;
  for (int i = 1; i <= k; ++i) {
    for (int c = std::min(i, j); c >= 1; --c) row[c] = row[c - 1] + c * row[c];
    row[0] = 0;
  }
  return row[j];
}

BigInt bell(int k) { return gen_bell(1, k); }

BigInt gen_bell(int m, int k) {
  if (m < 1) throw ValidationError("gen_bell needs m >= 1");
  if (k < 0) throw ValidationError("gen_bell needs k >= 0");
  BigInt total = 0;
  BigInt power = 1;
  for (int j = 0; j <= k; ++j) {
    total += stirling2(k, j) * power;
    power *= m;
  }
  return total;
}

std::vector<BigInt> egf_power_coeffs(std::span<const BigInt> a, int m) {
  if (a.empty()) throw ValidationError("egf_power_coeffs needs a non-empty sequence");
  if (m < 1) throw ValidationError("egf_power_coeffs needs m >= 1");
  const std::size_t len = a.size();
  // Binomial table up to len-1.
  std::vector<std::vector<BigInt>> binom(len);
  for (std::size_t i = 0; i < len; ++i) {
    binom[i].assign(i + 1, 1);
    for (std::size_t j = 1; j < i; ++j) {
      binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
    }
  }
  std::vector<BigInt> acc(a.begin(), a.end());
  for (int step = 1; step < m; ++step) {
    std::vector<BigInt> next(len, 0);
    for (std::size_t k = 0; k < len; ++k) {
      for (std::size_t i = 0; i <= k; ++i) {
        next[k] += binom[k][i] * acc[i] * a[k - i];
      }
    }
    acc = std::move(next);
  }
  return acc;
}

namespace {

void check_caps(int k, int m, const EnumerationCaps& caps) {
  if (k < 0) throw ValidationError("k must be >= 0");
  if (m < 1) throw ValidationError("m must be >= 1");
  if (k > caps.max_k) {
    throw BudgetError("k=" + std::to_string(k) + " exceeds enumeration cap " +
                      std::to_string(caps.max_k));
  }
  if (m > caps.max_m) {
    throw BudgetError("m=" + std::to_string(m) + " exceeds enumeration cap " +
                      std::to_string(caps.max_m));
  }
}

}  // namespace

std::vector<SetPartition> enumerate_set_partitions(int k,
                                                   const EnumerationCaps& caps) {
  check_caps(k, 1, caps);
  std::vector<SetPartition> out;
  std::vector<std::uint8_t> rgs(static_cast<std::size_t>(k), 0);
  // Odometer over restricted-growth strings in lexicographic order.
  while (true) {
    out.push_back(SetPartition::from_rgs(rgs));
    int i = k - 1;
    for (; i >= 1; --i) {
      const int prefix_max =
          *std::max_element(rgs.begin(), rgs.begin() + i);
      if (rgs[i] <= prefix_max) {
        ++rgs[i];
        std::fill(rgs.begin() + i + 1, rgs.end(), 0);
        break;
      }
    }
    if (i < 1) break;
  }
  return out;
}

std::vector<ColoredPartition> enumerate_colored_partitions(
    int k, int m, const EnumerationCaps& caps) {
  check_caps(k, m, caps);
  std::vector<ColoredPartition> out;
  for (const SetPartition& p : enumerate_set_partitions(k, caps)) {
    const int blocks = p.num_blocks();
    std::vector<int> colors(static_cast<std::size_t>(blocks), 0);
    while (true) {
      out.emplace_back(p, colors, m);
      int b = blocks - 1;
      for (; b >= 0; --b) {
        if (++colors[b] < m) break;
        colors[b] = 0;
      }
      if (b < 0) break;
    }
  }
  return out;
}

}  // namespace invlayers::combinat
