#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gchaos/partition.hpp"

namespace gchaos {

inline constexpr int kMaxTensorOrder = 8;
inline constexpr std::size_t kMaxTensorElements = 100'000'000;

// Dense real tensor of order d, row-major with the last index fastest.
// Immutable after construction; indices are 0-based in code, the 1-based
// convention lives only in text I/O.
class Tensor {
 public:
  Tensor(std::vector<int> shape, std::vector<double> data);

  int order() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  const std::vector<double>& data() const { return data_; }
  std::size_t size() const { return data_.size(); }

  std::size_t flat_index(std::span<const int> index) const;
  double at(std::span<const int> index) const {
    return data_[flat_index(index)];
  }
  // Row-major strides, stride of the last axis is 1.
  const std::vector<std::size_t>& strides() const { return strides_; }

  double frobenius() const;

  static Tensor zeros(std::vector<int> shape);

 private:
  std::vector<int> shape_;
  std::vector<std::size_t> strides_;
  std::vector<double> data_;
};

Tensor make_tensor(std::vector<int> shape, std::vector<double> data);

// Index bookkeeping for one unfolding: each block of the partition becomes a
// grouped axis whose coordinates enumerate the block's multi-indices in
// row-major order (last axis of the block fastest).
struct BlockUnfolding {
  std::vector<int> source_shape;
  Partition partition;
  std::vector<int> grouped_shape;
  std::vector<std::vector<int>> block_axes;             // 0-based, ascending
  std::vector<std::vector<std::size_t>> block_strides;  // within grouped axis

  std::vector<int> to_grouped(std::span<const int> source_index) const;
  std::vector<int> to_source(std::span<const int> grouped_index) const;
};

struct UnfoldResult {
  Tensor tensor;
  BlockUnfolding map;
};

// Rearranges entries of a into an order-k tensor whose axis l enumerates the
// multi-indices of block l. Frobenius norm is preserved exactly.
UnfoldResult unfold(const Tensor& a, const Partition& p);

// Contracts one axis (0-based) with v, returning a tensor of order d-1.
// Requires order >= 2.
Tensor contract_axis(const Tensor& a, int axis, std::span<const double> v);

// Contracts the given axes (0-based, distinct) with their vectors; at least
// one axis must remain.
Tensor contract_block(const Tensor& a, const std::vector<int>& axes,
                      const std::vector<std::vector<double>>& vectors);

// Full contraction: the multilinear form of a at one vector per axis.
double multilinear_value(const Tensor& a,
                         const std::vector<std::vector<double>>& vectors);

// JSON file format: {"order": d, "shape": [n1,...,nd], "data": [row-major]}.
Tensor tensor_from_json_text(const std::string& text);
std::string tensor_to_json_text(const Tensor& a);
Tensor load_tensor_json(const std::string& path);
void save_tensor_json(const Tensor& a, const std::string& path);

}  // namespace gchaos
