#pragma once

// Pure value operations on tensors. These never record anything; the
// differentiable versions in autodiff.hpp call into them for the forward
// values.

#include "mshyper/tensor.hpp"

namespace mshyper {

inline constexpr double kLeakySlope = 0.01;

// a[m x k] * b[k x n]. Throws DimensionError on inner-extent mismatch.
Tensor matmul(const Tensor& a, const Tensor& b);
// a[m x k] * b[n x k]^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);
// a[k x m]^T * b[k x n]
Tensor matmul_tn(const Tensor& a, const Tensor& b);

Tensor transpose(const Tensor& a);

// Row-wise softmax of (logits - (1 - mask) * c), computed with per-row max
// subtraction. Requires c > 0 and at least one set bit per mask row
// (DegenerateMaskError otherwise).
Tensor masked_softmax(const Tensor& logits, const BinaryMatrix& mask, double c);

// Elementwise max(x, slope * x). slope must lie in (0, 1].
Tensor leaky_relu(const Tensor& x, double slope = kLeakySlope);

}  // namespace mshyper
