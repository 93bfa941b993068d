#include "gchaos/partition.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace gchaos {

namespace {

constexpr int kMaxGroundSize = 20;  // stirling2 stays inside uint64 here

void check_ground_size(int d) {
  if (d < 1 || d > kMaxGroundSize) {
    throw std::invalid_argument("ground-set size must be in [1, 20]");
  }
}

}  // namespace

Partition make_partition(std::vector<std::vector<int>> blocks, int d) {
  check_ground_size(d);
  if (blocks.empty()) {
    throw std::invalid_argument("partition needs at least one block");
  }
  std::vector<bool> seen(static_cast<std::size_t>(d), false);
  std::size_t covered = 0;
  for (auto& block : blocks) {
    if (block.empty()) {
      throw std::invalid_argument("partition block is empty");
    }
    std::sort(block.begin(), block.end());
    for (int e : block) {
      if (e < 1 || e > d) {
        throw std::invalid_argument("partition element outside {1,...,d}");
      }
      if (seen[static_cast<std::size_t>(e - 1)]) {
        throw std::invalid_argument("partition blocks are not disjoint");
      }
      seen[static_cast<std::size_t>(e - 1)] = true;
      ++covered;
    }
  }
  if (covered != static_cast<std::size_t>(d)) {
    throw std::invalid_argument("partition does not cover {1,...,d}");
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return Partition{std::move(blocks), d};
}

std::vector<Partition> enumerate_partitions(int d, int k) {
  check_ground_size(d);
  if (k < 1 || k > d) {
    throw std::invalid_argument("block count must be in [1, d]");
  }
  // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<Partition> out;
  std::vector<int> a(static_cast<std::size_t>(d), 0);
  auto emit = [&] {
    std::vector<std::vector<int>> blocks(static_cast<std::size_t>(k));
    for (int i = 0; i < d; ++i) {
      blocks[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])]
          .push_back(i + 1);
    }
    out.push_back(Partition{std::move(blocks), d});
  };
  auto walk = [&](auto&& self, int pos, int used) -> void {
    if (used + (d - pos) < k) return;  // cannot still reach k blocks
    if (pos == d) {
      if (used == k) emit();
      return;
    }
    int cap = std::min(used, k - 1);
    for (int v = 0; v <= cap; ++v) {
      a[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, std::max(used, v + 1));
    }
  };
  walk(walk, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Partition> enumerate_all_partitions(int d) {
  std::vector<Partition> out;
  for (int k = 1; k <= d; ++k) {
    auto part = enumerate_partitions(d, k);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

bool refines(const Partition& p, const Partition& q) {
  if (p.ground_size != q.ground_size) {
    throw std::invalid_argument("refines: mismatched ground-set sizes");
  }
  // block_of[e-1] = index of q's block containing e
  std::vector<int> block_of(static_cast<std::size_t>(q.ground_size), -1);
  for (int b = 0; b < q.block_count(); ++b) {
    for (int e : q.blocks[static_cast<std::size_t>(b)]) {
      block_of[static_cast<std::size_t>(e - 1)] = b;
    }
  }
  for (const auto& block : p.blocks) {
    int home = block_of[static_cast<std::size_t>(block.front() - 1)];
    for (int e : block) {
      if (block_of[static_cast<std::size_t>(e - 1)] != home) return false;
    }
  }
  return true;
}

std::uint64_t stirling2(int d, int k) {
  check_ground_size(d);
  if (k < 0 || k > d) return 0;
  if (k == 0) return d == 0 ? 1 : 0;
  // S(d,k) = k*S(d-1,k) + S(d-1,k-1)
  std::vector<std::uint64_t> row(static_cast<std::size_t>(d + 1), 0);
  row[0] = 1;
  for (int n = 1; n <= d; ++n) {
    for (int j = std::min(n, d); j >= 1; --j) {
      row[static_cast<std::size_t>(j)] =
          static_cast<std::uint64_t>(j) * row[static_cast<std::size_t>(j)] +
          row[static_cast<std::size_t>(j - 1)];
    }
    row[0] = 0;
  }
  return row[static_cast<std::size_t>(k)];
}

std::uint64_t bell_number(int d) {
  check_ground_size(d);
  std::uint64_t total = 0;
  for (int k = 1; k <= d; ++k) total += stirling2(d, k);
  return total;
}

std::string format_partition(const Partition& p) {
  std::ostringstream os;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    if (b > 0) os << '|';
    for (std::size_t i = 0; i < p.blocks[b].size(); ++i) {
      if (i > 0) os << ',';
      os << p.blocks[b][i];
    }
  }
  return os.str();
}

Partition parse_partition(const std::string& text, int d) {
  std::vector<std::vector<int>> blocks;
  std::istringstream is(text);
  std::string block_text;
  while (std::getline(is, block_text, '|')) {
    std::vector<int> block;
    std::istringstream bs(block_text);
    std::string elem;
    while (std::getline(bs, elem, ',')) {
      std::size_t used = 0;
      int value = 0;
      try {
        value = std::stoi(elem, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("partition syntax: bad element '" + elem +
                                    "'");
      }
      if (used != elem.size()) {
        throw std::invalid_argument("partition syntax: bad element '" + elem +
                                    "'");
      }
      block.push_back(value);
    }
    if (block.empty()) {
      throw std::invalid_argument("partition syntax: empty block");
    }
    blocks.push_back(std::move(block));
  }
  return make_partition(std::move(blocks), d);
}

}  // namespace gchaos
