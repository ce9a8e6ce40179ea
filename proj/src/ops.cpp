#include "mshyper/ops.hpp"

#include <algorithm>
#include <cmath>

#include "mshyper/error.hpp"
#include "mshyper/kernels.hpp"

namespace mshyper {

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  }
  Tensor c({a.rows(), b.cols()});
  kernels::active().gemm_nn(a.rows(), b.cols(), a.cols(), a.raw(), b.raw(), c.raw());
  return c;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul_nt: " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()) + "^T");
  }
  Tensor c({a.rows(), b.rows()});
  kernels::active().gemm_nt(a.rows(), b.rows(), a.cols(), a.raw(), b.raw(), c.raw());
  return c;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("matmul_tn: " + shape_string(a.shape()) + "^T x " +
                         shape_string(b.shape()));
  }
  Tensor c({a.cols(), b.cols()});
  kernels::active().gemm_tn(a.cols(), b.cols(), a.rows(), a.raw(), b.raw(), c.raw());
  return c;
}

Tensor transpose(const Tensor& a) {
  Tensor t({a.cols(), a.rows()});
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.cols(); ++c) t.at(c, r) = a.at(r, c);
  }
  return t;
}

Tensor masked_softmax(const Tensor& logits, const BinaryMatrix& mask, double c) {
  if (!(c > 0.0)) throw NumericError("masked_softmax: mask constant must be positive");
  if (mask.rows() != logits.rows() || mask.cols() != logits.cols()) {
    throw DimensionError("masked_softmax: logits " + shape_string(logits.shape()) + " vs mask [" +
                         std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()) + "]");
  }
  const std::size_t n = logits.cols();
  Tensor out(logits.shape());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto in = logits.row(r);
    auto o = out.row(r);
    bool any = false;
    double mx = -INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
      const bool keep = mask.get(r, j);
      any = any || keep;
      o[j] = keep ? in[j] : in[j] - c;
      mx = std::max(mx, o[j]);
    }
    if (!any) throw DegenerateMaskError("masked_softmax: mask row " + std::to_string(r) + " is all zero");
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      o[j] = std::exp(o[j] - mx);
      sum += o[j];
    }
    const double inv = 1.0 / sum;
    for (std::size_t j = 0; j < n; ++j) o[j] *= inv;
  }
  return out;
}

Tensor leaky_relu(const Tensor& x, double slope) {
  if (!(slope > 0.0 && slope <= 1.0)) throw NumericError("leaky_relu: slope must be in (0, 1]");
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : slope * x[i];
  return y;
}

}  // namespace mshyper
