#include "seesim/partitions.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace seesim {

namespace {

constexpr int kMaxGroundSet = 12;

Partition rgs_to_partition(const std::vector<int>& rgs) {
  Partition p;
  p.k = static_cast<int>(rgs.size());
  int nblocks = 0;
  for (int label : rgs) nblocks = std::max(nblocks, label + 1);
  p.blocks.assign(nblocks, {});
  for (int idx = 0; idx < p.k; ++idx) p.blocks[rgs[idx]].push_back(idx + 1);
  return p;
}

}  // namespace

std::vector<Partition> enumerate_partitions(int k) {
  if (k < 0) throw std::invalid_argument("enumerate_partitions: k must be nonnegative");
  if (k > kMaxGroundSet)
    throw std::invalid_argument("enumerate_partitions: k = " + std::to_string(k) +
                                " exceeds the combinatorial guard k <= 12");
  std::vector<Partition> out;
  if (k == 0) return out;

  // Restricted growth strings: rgs[0] = 0, rgs[i] <= 1 + max(rgs[0..i-1]).
  // Lexicographic RGS order lists blocks min-ordered by construction.
  std::vector<int> rgs(k, 0);
  std::vector<int> prefix_max(k, 0);  // prefix_max[i] = max(rgs[0..i-1]); prefix_max[0] = 0
  while (true) {
    out.push_back(rgs_to_partition(rgs));
    int i = k - 1;
    while (i > 0 && rgs[i] > prefix_max[i]) --i;
    if (i == 0) break;
    ++rgs[i];
    for (int j = i + 1; j < k; ++j) {
      rgs[j] = 0;
      prefix_max[j] = std::max(prefix_max[j - 1], rgs[j - 1]);
    }
  }
  return out;
}

std::vector<Partition> enumerate_proper_partitions(int k) {
  std::vector<Partition> all = enumerate_partitions(k);
  std::erase_if(all, [](const Partition& p) { return p.block_count() == 1; });
  return all;
}

std::vector<int> select_block_indices(const Partition& p, int i) {
  if (i < 1 || i > p.block_count())
    throw std::out_of_range("select_block_indices: block index out of range");
  std::vector<int> out;
  out.reserve(p.blocks[i - 1].size() + 1);
  out.push_back(0);
  for (int e : p.blocks[i - 1]) out.push_back(e);
  return out;
}

Partition relabel_to_subset(const Partition& p, const std::vector<int>& subset) {
  if (static_cast<int>(subset.size()) != p.k)
    throw std::invalid_argument("relabel_to_subset: |subset| must equal partition ground-set size");
  if (!std::is_sorted(subset.begin(), subset.end()))
    throw std::invalid_argument("relabel_to_subset: subset must be sorted ascending");
  Partition out;
  out.k = p.k;
  out.blocks.reserve(p.blocks.size());
  for (const auto& block : p.blocks) {
    std::vector<int> mapped;
    mapped.reserve(block.size());
    for (int e : block) mapped.push_back(subset[e - 1]);
    out.blocks.push_back(std::move(mapped));
  }
  // The order isomorphism is monotone, so canonical ordering carries over.
  return out;
}

bool is_canonical_partition(const Partition& p) {
  std::vector<bool> seen(p.k + 1, false);
  int prev_min = 0;
  int total = 0;
  for (const auto& block : p.blocks) {
    if (block.empty()) return false;
    if (!std::is_sorted(block.begin(), block.end())) return false;
    if (block.front() <= prev_min) return false;
    prev_min = block.front();
    for (int e : block) {
      if (e < 1 || e > p.k || seen[e]) return false;
      seen[e] = true;
      ++total;
    }
  }
  return total == p.k;
}

}  // namespace seesim
