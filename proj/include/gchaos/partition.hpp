#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gchaos {

// Set partition of {1,...,d} in canonical form: every block sorted
// ascending, blocks ordered by their smallest element.
struct Partition {
  std::vector<std::vector<int>> blocks;
  int ground_size = 0;

  int block_count() const { return static_cast<int>(blocks.size()); }
  bool operator==(const Partition&) const = default;
  bool operator<(const Partition& other) const { return blocks < other.blocks; }
};

// Validates and canonicalizes. Throws std::invalid_argument when the blocks
// are not disjoint, nonempty and covering {1,...,d}.
Partition make_partition(std::vector<std::vector<int>> blocks, int d);

// All partitions of {1,...,d} into exactly k blocks, in lexicographic order
// of their canonical form. Size is Stirling2(d, k).
std::vector<Partition> enumerate_partitions(int d, int k);

// All partitions of {1,...,d}, k = 1..d, each k-group in lexicographic
// order. Size is Bell(d).
std::vector<Partition> enumerate_all_partitions(int d);

// True iff every block of p is contained in some block of q.
bool refines(const Partition& p, const Partition& q);

std::uint64_t stirling2(int d, int k);
std::uint64_t bell_number(int d);

// Text form: blocks separated by '|', elements by ',', e.g. "1|2,3".
std::string format_partition(const Partition& p);
Partition parse_partition(const std::string& text, int d);

}  // namespace gchaos
