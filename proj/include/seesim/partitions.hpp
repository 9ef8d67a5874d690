#pragma once

#include <cstdint>
#include <vector>

namespace seesim {

/// An ordered set partition of {1,...,k}. Blocks are sorted ascending by
/// their minimum element and elements within a block are sorted ascending,
/// so the representation is canonical.
struct Partition {
  int k = 0;
  std::vector<std::vector<int>> blocks;

  int block_count() const { return static_cast<int>(blocks.size()); }
  bool operator==(const Partition&) const = default;
};

/// All set partitions of {1,...,k} in lexicographic restricted-growth-string
/// order (which lists blocks min-ordered by construction). k = 0 yields the
/// empty family. Guarded at k <= 12.
std::vector<Partition> enumerate_partitions(int k);

/// enumerate_partitions(k) with the single-block partition removed.
std::vector<Partition> enumerate_proper_partitions(int k);

/// Picks (u_0, u_{I_{i,1}}, ..., u_{I_{i,#}}) for block i (1-based) of p.
/// u must have length k+1; entries are abstract, so this returns indices
/// into u: {0, I_{i,1}, ..., I_{i,#}}.
std::vector<int> select_block_indices(const Partition& p, int i);

/// Transports a partition of {1,...,m} onto a sorted index set I of size m
/// via the order isomorphism j -> I[j-1]. Canonical ordering is preserved.
Partition relabel_to_subset(const Partition& p, const std::vector<int>& subset);

/// Validates the canonical-form invariants; used by tests and enumeration.
bool is_canonical_partition(const Partition& p);

}  // namespace seesim
