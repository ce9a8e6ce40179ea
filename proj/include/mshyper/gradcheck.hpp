#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "mshyper/autodiff.hpp"

namespace mshyper {

// Builds a scalar loss on the given tape. Must read parameters through
// tape.param() so that the recorded adjoints reach ParamTensor::grad.
using LossBuilder = std::function<Var(Tape&)>;

struct GradCheckOptions {
  double step = 1e-5;
  // Coordinates sampled across all parameters; every coordinate is checked
  // when the total count is at most this.
  std::size_t max_coordinates = 256;
  std::uint64_t seed = 0x5eed;
};

struct GradCheckReport {
  // max over checked coordinates of |analytic - numeric| / max(1, |numeric|)
  double max_rel_error = 0.0;
  std::size_t coordinates = 0;
};

// Central finite differences against the recorded adjoints. Leaves parameter
// values untouched and leaves the analytic gradient in ParamTensor::grad.
// Throws DeterminismError if two evaluations at the same point disagree.
GradCheckReport grad_check(const LossBuilder& loss, std::span<ParamTensor* const> params,
                           const GradCheckOptions& options = {});

}  // namespace mshyper
