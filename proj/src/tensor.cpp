#include "gchaos/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace gchaos {

namespace {

std::vector<std::size_t> row_major_strides(const std::vector<int>& shape) {
  std::vector<std::size_t> strides(shape.size(), 1);
  for (int j = static_cast<int>(shape.size()) - 2; j >= 0; --j) {
    strides[static_cast<std::size_t>(j)] =
        strides[static_cast<std::size_t>(j + 1)] *
        static_cast<std::size_t>(shape[static_cast<std::size_t>(j + 1)]);
  }
  return strides;
}

std::size_t checked_element_count(const std::vector<int>& shape) {
  if (shape.empty()) {
    throw std::invalid_argument("tensor shape is empty");
  }
  if (shape.size() > static_cast<std::size_t>(kMaxTensorOrder)) {
    throw std::invalid_argument("tensor order exceeds the supported maximum");
  }
  std::size_t count = 1;
  for (int n : shape) {
    if (n < 1) {
      throw std::invalid_argument("tensor dimensions must be positive");
    }
    if (count > kMaxTensorElements / static_cast<std::size_t>(n)) {
      throw std::invalid_argument("tensor element count exceeds the limit");
    }
    count *= static_cast<std::size_t>(n);
  }
  return count;
}

}  // namespace

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  std::size_t count = checked_element_count(shape_);
  if (data_.size() != count) {
    throw std::invalid_argument("tensor data length does not match shape");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("tensor entries must be finite");
    }
  }
  strides_ = row_major_strides(shape_);
}

std::size_t Tensor::flat_index(std::span<const int> index) const {
  if (index.size() != shape_.size()) {
    throw std::invalid_argument("index arity does not match tensor order");
  }
  std::size_t flat = 0;
  for (std::size_t j = 0; j < shape_.size(); ++j) {
    if (index[j] < 0 || index[j] >= shape_[j]) {
      throw std::out_of_range("tensor index out of range");
    }
    flat += static_cast<std::size_t>(index[j]) * strides_[j];
  }
  return flat;
}

double Tensor::frobenius() const {
  double sum = 0.0;
  for (double v : data_) sum += v * v;
  return std::sqrt(sum);
}

Tensor Tensor::zeros(std::vector<int> shape) {
  std::size_t count = checked_element_count(shape);
  return Tensor(std::move(shape), std::vector<double>(count, 0.0));
}

Tensor make_tensor(std::vector<int> shape, std::vector<double> data) {
  return Tensor(std::move(shape), std::move(data));
}

std::vector<int> BlockUnfolding::to_grouped(
    std::span<const int> source_index) const {
  std::vector<int> grouped(block_axes.size(), 0);
  for (std::size_t b = 0; b < block_axes.size(); ++b) {
    std::size_t g = 0;
    for (std::size_t j = 0; j < block_axes[b].size(); ++j) {
      g += static_cast<std::size_t>(
               source_index[static_cast<std::size_t>(block_axes[b][j])]) *
           block_strides[b][j];
    }
    grouped[b] = static_cast<int>(g);
  }
  return grouped;
}

std::vector<int> BlockUnfolding::to_source(
    std::span<const int> grouped_index) const {
  std::vector<int> source(source_shape.size(), 0);
  for (std::size_t b = 0; b < block_axes.size(); ++b) {
    std::size_t rest = static_cast<std::size_t>(grouped_index[b]);
    for (std::size_t j = 0; j < block_axes[b].size(); ++j) {
      std::size_t coord = rest / block_strides[b][j];
      rest %= block_strides[b][j];
      source[static_cast<std::size_t>(block_axes[b][j])] =
          static_cast<int>(coord);
    }
  }
  return source;
}

UnfoldResult unfold(const Tensor& a, const Partition& p) {
  if (p.ground_size != a.order()) {
    throw std::invalid_argument("partition does not match tensor order");
  }
  Partition canon = make_partition(p.blocks, p.ground_size);
  const auto& shape = a.shape();

  BlockUnfolding map;
  map.source_shape = shape;
  map.partition = canon;
  for (const auto& block : canon.blocks) {
    std::vector<int> axes;
    axes.reserve(block.size());
    for (int e : block) axes.push_back(e - 1);
    std::vector<std::size_t> strides(axes.size(), 1);
    for (int j = static_cast<int>(axes.size()) - 2; j >= 0; --j) {
      strides[static_cast<std::size_t>(j)] =
          strides[static_cast<std::size_t>(j + 1)] *
          static_cast<std::size_t>(
              shape[static_cast<std::size_t>(axes[static_cast<std::size_t>(
                  j + 1)])]);
    }
    std::size_t grouped_dim =
        strides.front() *
        static_cast<std::size_t>(shape[static_cast<std::size_t>(axes.front())]);
    map.grouped_shape.push_back(static_cast<int>(grouped_dim));
    map.block_axes.push_back(std::move(axes));
    map.block_strides.push_back(std::move(strides));
  }

  // Destination stride of each source axis: its stride inside the grouped
  // axis times the output stride of that grouped axis.
  std::vector<std::size_t> out_strides = row_major_strides(map.grouped_shape);
  std::vector<std::size_t> dest_stride(shape.size(), 0);
  for (std::size_t b = 0; b < map.block_axes.size(); ++b) {
    for (std::size_t j = 0; j < map.block_axes[b].size(); ++j) {
      dest_stride[static_cast<std::size_t>(map.block_axes[b][j])] =
          map.block_strides[b][j] * out_strides[b];
    }
  }

  std::vector<double> out(a.size(), 0.0);
  const auto& src = a.data();
  std::vector<int> idx(shape.size(), 0);
  std::size_t dest = 0;
  for (std::size_t s = 0; s < src.size(); ++s) {
    out[dest] = src[s];
    // odometer increment, last source axis fastest
    for (int j = static_cast<int>(shape.size()) - 1; j >= 0; --j) {
      auto ju = static_cast<std::size_t>(j);
      dest += dest_stride[ju];
      if (++idx[ju] < shape[ju]) break;
      dest -= dest_stride[ju] * static_cast<std::size_t>(shape[ju]);
      idx[ju] = 0;
    }
  }
  return UnfoldResult{Tensor(map.grouped_shape, std::move(out)),
                      std::move(map)};
}

Tensor contract_axis(const Tensor& a, int axis, std::span<const double> v) {
  if (a.order() < 2) {
    throw std::invalid_argument("contract_axis requires order >= 2");
  }
  if (axis < 0 || axis >= a.order()) {
    throw std::invalid_argument("contract_axis: axis out of range");
  }
  auto au = static_cast<std::size_t>(axis);
  const auto& shape = a.shape();
  auto n = static_cast<std::size_t>(shape[au]);
  if (v.size() != n) {
    throw std::invalid_argument("contract_axis: vector length mismatch");
  }
  std::size_t inner = 1;
  for (std::size_t j = au + 1; j < shape.size(); ++j) {
    inner *= static_cast<std::size_t>(shape[j]);
  }
  std::size_t outer = a.size() / (n * inner);

  std::vector<int> out_shape;
  for (std::size_t j = 0; j < shape.size(); ++j) {
    if (j != au) out_shape.push_back(shape[j]);
  }
  std::vector<double> out(outer * inner, 0.0);
  const auto& src = a.data();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t k = 0; k < n; ++k) {
      double w = v[k];
      if (w == 0.0) continue;
      const double* s = src.data() + (o * n + k) * inner;
      double* t = out.data() + o * inner;
      for (std::size_t i = 0; i < inner; ++i) t[i] += w * s[i];
    }
  }
  return Tensor(std::move(out_shape), std::move(out));
}

Tensor contract_block(const Tensor& a, const std::vector<int>& axes,
                      const std::vector<std::vector<double>>& vectors) {
  if (axes.size() != vectors.size()) {
    throw std::invalid_argument("contract_block: one vector per axis required");
  }
  if (axes.empty()) {
    throw std::invalid_argument("contract_block: no axes given");
  }
  if (axes.size() >= static_cast<std::size_t>(a.order())) {
    throw std::invalid_argument("contract_block: at least one axis must remain");
  }
  // Contract from the highest axis down so earlier axis numbers stay valid.
  std::vector<std::size_t> order(axes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return axes[x] > axes[y]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (axes[order[i]] == axes[order[i - 1]]) {
      throw std::invalid_argument("contract_block: duplicate axis");
    }
  }
  Tensor cur = contract_axis(a, axes[order[0]], vectors[order[0]]);
  for (std::size_t i = 1; i < order.size(); ++i) {
    cur = contract_axis(cur, axes[order[i]], vectors[order[i]]);
  }
  return cur;
}

double multilinear_value(const Tensor& a,
                         const std::vector<std::vector<double>>& vectors) {
  if (vectors.size() != static_cast<std::size_t>(a.order())) {
    throw std::invalid_argument("multilinear_value: one vector per axis");
  }
  if (a.order() == 1) {
    const auto& v = vectors[0];
    if (v.size() != a.size()) {
      throw std::invalid_argument("multilinear_value: vector length mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += a.data()[i] * v[i];
    return s;
  }
  Tensor cur = contract_axis(a, a.order() - 1, vectors.back());
  for (int axis = a.order() - 2; axis >= 1; --axis) {
    cur = contract_axis(cur, axis, vectors[static_cast<std::size_t>(axis)]);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < cur.size(); ++i) {
    s += cur.data()[i] * vectors[0][i];
  }
  return s;
}

Tensor tensor_from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("order") || !j.contains("shape") || !j.contains("data")) {
    throw std::invalid_argument("tensor JSON needs order, shape and data");
  }
  int order = j.at("order").get<int>();
  auto shape = j.at("shape").get<std::vector<int>>();
  auto data = j.at("data").get<std::vector<double>>();
  if (order != static_cast<int>(shape.size())) {
    throw std::invalid_argument("tensor JSON: order does not match shape");
  }
  return make_tensor(std::move(shape), std::move(data));
}

std::string tensor_to_json_text(const Tensor& a) {
  nlohmann::ordered_json j;
  j["order"] = a.order();
  j["shape"] = a.shape();
  j["data"] = a.data();
  return j.dump();
}

Tensor load_tensor_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open tensor file: " + path);
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return tensor_from_json_text(text);
}

void save_tensor_json(const Tensor& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write tensor file: " + path);
  }
  out << tensor_to_json_text(a) << '\n';
}

}  // namespace gchaos
