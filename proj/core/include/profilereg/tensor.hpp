#pragma once

#include <string>
#include <utility>
#include <vector>

#include "profilereg/rng.hpp"

namespace profilereg::nn {

// Dense row-major float64 tensor. `grad` is either empty or the same size as
// `values`; parameters keep a live grad accumulator, plain values do not.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> values;
  std::vector<double> grad;

  Tensor() = default;

  static Tensor zeros(std::vector<int> shape);
  static Tensor from(std::vector<int> shape, std::vector<double> values);
  static Tensor scalar(double v);
  static Tensor uniform(std::vector<int> shape, double lo, double hi, Rng& rng);

  int size() const;
  int ndim() const { return static_cast<int>(shape.size()); }
  int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  // 2-D access; callers are expected to know the rank.
  double& at(int r, int c) { return values[static_cast<std::size_t>(r) * dim(1) + c]; }
  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * dim(1) + c]; }
  double& at(int i) { return values[static_cast<std::size_t>(i)]; }
  double at(int i) const { return values[static_cast<std::size_t>(i)]; }

  void ensure_grad();
  void zero_grad();
};

// Named view used for optimizer state, checkpoints and gradient checks.
using NamedTensor = std::pair<std::string, Tensor*>;

std::string shape_string(const std::vector<int>& shape);
int shape_size(const std::vector<int>& shape);

}  // namespace profilereg::nn
