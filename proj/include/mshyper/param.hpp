#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "mshyper/tensor.hpp"

namespace mshyper {

// A learnable tensor with its gradient buffer and Adam moment state.
struct ParamTensor {
  ParamTensor() = default;
  ParamTensor(std::string name, Shape shape);

  std::string name;
  Tensor value;
  Tensor grad;
  Tensor adam_m;
  Tensor adam_v;

  const Shape& shape() const { return value.shape(); }
  std::size_t size() const { return value.size(); }
  void zero_grad() { grad.fill(0.0); }
};

struct AdamSettings {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update. `step` is the 1-based update count.
// Throws NumericError if the gradient holds a non-finite value.
void adam_step(ParamTensor& p, const AdamSettings& settings, std::uint64_t step);

using Rng = std::mt19937_64;

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(ParamTensor& p, std::size_t fan_in, std::size_t fan_out, Rng& rng);

}  // namespace mshyper
