#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace marllb::nn {

// Row-major value matrix with a same-shaped gradient accumulator.
struct Tensor {
  std::size_t rows = 0;
  std::size_t cols = 1;
  std::vector<double> v;
  std::vector<double> g;

  static Tensor make(std::size_t rows, std::size_t cols = 1);
  std::size_t size() const { return rows * cols; }
  double& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
  void zero_grad();
  bool values_finite() const;
  bool grads_finite() const;
};

struct NamedTensor {
  std::string name;
  Tensor* tensor;
};

// target <- (1 - tau) * target + tau * source, elementwise
void soft_update(Tensor& target, const Tensor& source, double tau);
void soft_update(const std::vector<Tensor*>& target,
                 const std::vector<Tensor*>& source, double tau);

}  // namespace marllb::nn
