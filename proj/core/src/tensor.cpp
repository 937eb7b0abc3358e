#include "profilereg/tensor.hpp"

#include <stdexcept>

namespace profilereg::nn {

int shape_size(const std::vector<int>& shape) {
  int n = 1;
  for (int d : shape) {
    if (d < 0) throw std::invalid_argument("tensor dimension must be nonnegative");
    n *= d;
  }
  return n;
}

std::string shape_string(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  s += "]";
  return s;
}

Tensor Tensor::zeros(std::vector<int> shape) {
  Tensor t;
  int n = shape_size(shape);
  t.shape = std::move(shape);
  t.values.assign(static_cast<std::size_t>(n), 0.0);
  return t;
}

Tensor Tensor::from(std::vector<int> shape, std::vector<double> values) {
  if (shape_size(shape) != static_cast<int>(values.size())) {
    throw std::invalid_argument("tensor shape " + shape_string(shape) +
                                " does not match value count " + std::to_string(values.size()));
  }
  Tensor t;
  t.shape = std::move(shape);
  t.values = std::move(values);
  return t;
}

Tensor Tensor::scalar(double v) { return from({1}, {v}); }

Tensor Tensor::uniform(std::vector<int> shape, double lo, double hi, Rng& rng) {
  Tensor t = zeros(std::move(shape));
  for (double& v : t.values) v = profilereg::uniform(rng, lo, hi);
  return t;
}

int Tensor::size() const { return static_cast<int>(values.size()); }

void Tensor::ensure_grad() {
  if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
}

void Tensor::zero_grad() { grad.assign(values.size(), 0.0); }

}  // namespace profilereg::nn
