#include "mshyper/param.hpp"

#include <cmath>

#include "mshyper/error.hpp"

namespace mshyper {

ParamTensor::ParamTensor(std::string name_in, Shape shape)
    : name(std::move(name_in)), value(shape), grad(shape), adam_m(shape), adam_v(shape) {}

void adam_step(ParamTensor& p, const AdamSettings& s, std::uint64_t step) {
  if (step == 0) throw NumericError("adam_step: step count starts at 1");
  require_finite(p.grad.raw(), p.grad.size(), "adam_step gradient of '" + p.name + "'");
  const double t = static_cast<double>(step);
  const double correction1 = 1.0 - std::pow(s.beta1, t);
  const double correction2 = 1.0 - std::pow(s.beta2, t);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double g = p.grad[i];
    p.adam_m[i] = s.beta1 * p.adam_m[i] + (1.0 - s.beta1) * g;
    p.adam_v[i] = s.beta2 * p.adam_v[i] + (1.0 - s.beta2) * g * g;
    const double m_hat = p.adam_m[i] / correction1;
    const double v_hat = p.adam_v[i] / correction2;
    p.value[i] -= s.learning_rate * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

void glorot_uniform(ParamTensor& p, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : p.value.values()) v = dist(rng);
}

}  // namespace mshyper
