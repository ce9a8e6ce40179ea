#include "mshyper/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mshyper/error.hpp"
#include "mshyper/kernels.hpp"

namespace mshyper {

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor{}, false, nullptr, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::leaf(Tensor value) {
  nodes_.push_back(Node{std::move(value), Tensor{}, true, nullptr, {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::param(ParamTensor& p) {
  if (!track_gradients_) return constant(p.value);
  nodes_.push_back(Node{p.value, Tensor{}, true, &p, {}});
  return Var(this, nodes_.size() - 1);
}

Tensor Tape::grad(const Var& v) const {
  const Node& n = nodes_[v.id()];
  return n.grad.empty() ? Tensor::zeros_like(n.value) : n.grad;
}

Tensor& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor::zeros_like(n.value);
  return n.grad;
}

Var Tape::record(Tensor value, std::initializer_list<Var> parents, BackwardFn fn) {
  return record(std::move(value), std::span<const Var>(parents.begin(), parents.size()), std::move(fn));
}

Var Tape::record(Tensor value, std::span<const Var> parents, BackwardFn fn) {
  bool needs = false;
  for (const Var& p : parents) {
    if (&p.tape() != this) throw Error("autodiff: operands recorded on different tapes");
    needs = needs || nodes_[p.id()].requires_grad;
  }
  require_finite(value.raw(), value.size(), "autodiff op output");
  Node n{std::move(value), Tensor{}, needs, nullptr, {}};
  if (needs) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var(this, nodes_.size() - 1);
}

void Tape::backward(const Var& output, double seed) {
  if (output.value().size() != 1) {
    throw DimensionError("backward: output must hold a single value, got " +
                         shape_string(output.shape()));
  }
  for (auto& n : nodes_) n.grad = Tensor{};
  grad_buffer(output.id())[0] = seed;
  for (std::size_t id = output.id() + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (n.grad.empty() || !n.requires_grad) continue;
    if (n.backward) n.backward(*this, id);
  }
  for (auto& n : nodes_) {
    if (n.param != nullptr && !n.grad.empty()) n.param->grad.add_inplace(n.grad);
  }
}

namespace {

const Tensor& upstream(Tape& t, std::size_t self) { return t.grad_buffer(self); }

void expect_matrix_rows(const Var& x, const char* op) {
  if (x.value().rank() > 2) {
    throw DimensionError(std::string(op) + ": expects a matrix, got " + shape_string(x.shape()));
  }
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  Tensor out = matmul(a.value(), b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Tensor& g = upstream(t, self);
    const Tensor& av = t.value(ia);
    const Tensor& bv = t.value(ib);
    const auto& k = kernels::active();
    if (t.requires_grad(ia)) {
      // dA += G B^T
      k.gemm_nt(av.rows(), av.cols(), g.cols(), g.raw(), bv.raw(), t.grad_buffer(ia).raw());
    }
    if (t.requires_grad(ib)) {
      // dB += A^T G
      k.gemm_tn(bv.rows(), bv.cols(), av.rows(), av.raw(), g.raw(), t.grad_buffer(ib).raw());
    }
  });
}

Var matmul_nt(const Var& a, const Var& b) {
  Tensor out = matmul_nt(a.value(), b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Tensor& g = upstream(t, self);  // m x n
    const Tensor& av = t.value(ia);       // m x k
    const Tensor& bv = t.value(ib);       // n x k
    const auto& k = kernels::active();
    if (t.requires_grad(ia)) {
      k.gemm_nn(av.rows(), av.cols(), g.cols(), g.raw(), bv.raw(), t.grad_buffer(ia).raw());
    }
    if (t.requires_grad(ib)) {
      k.gemm_tn(bv.rows(), bv.cols(), g.rows(), g.raw(), av.raw(), t.grad_buffer(ib).raw());
    }
  });
}

Var add(const Var& a, const Var& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("add: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
  Tensor out = a.value();
  out.add_inplace(b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Tensor& g = upstream(t, self);
    if (t.requires_grad(ia)) t.grad_buffer(ia).add_inplace(g);
    if (t.requires_grad(ib)) t.grad_buffer(ib).add_inplace(g);
  });
}

Var add_bias(const Var& x, const Var& bias) {
  const Tensor& xv = x.value();
  const Tensor& bv = bias.value();
  if (bv.size() != xv.cols()) {
    throw DimensionError("add_bias: input " + shape_string(xv.shape()) + " vs bias " +
                         shape_string(bv.shape()));
  }
  Tensor out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bv[c];
  }
  const std::size_t ix = x.id(), ib = bias.id();
  return x.tape().record(std::move(out), {x, bias}, [ix, ib](Tape& t, std::size_t self) {
    const Tensor& g = upstream(t, self);
    if (t.requires_grad(ix)) t.grad_buffer(ix).add_inplace(g);
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad_buffer(ib);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        auto row = g.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) gb[c] += row[c];
      }
    }
  });
}

Var mul(const Var& a, const Var& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("mul: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Tensor& g = upstream(t, self);
    if (t.requires_grad(ia)) {
      Tensor& ga = t.grad_buffer(ia);
      const Tensor& bv = t.value(ib);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (t.requires_grad(ib)) {
      Tensor& gb = t.grad_buffer(ib);
      const Tensor& av = t.value(ia);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var scale(const Var& x, double factor) {
  Tensor out = x.value();
  for (auto& v : out.values()) v *= factor;
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix, factor](Tape& t, std::size_t self) {
    kernels::active().axpy(factor, upstream(t, self).raw(), t.grad_buffer(ix).raw(),
                           t.value(ix).size());
  });
}

Var scale_rows(const Var& x, std::vector<double> factors) {
  expect_matrix_rows(x, "scale_rows");
  const Tensor& xv = x.value();
  if (factors.size() != xv.rows()) {
    throw DimensionError("scale_rows: " + std::to_string(factors.size()) + " factors for " +
                         std::to_string(xv.rows()) + " rows");
  }
  Tensor out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (auto& v : out.row(r)) v *= factors[r];
  }
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x},
                         [ix, f = std::move(factors)](Tape& t, std::size_t self) {
                           const Tensor& g = upstream(t, self);
                           Tensor& gx = t.grad_buffer(ix);
                           for (std::size_t r = 0; r < g.rows(); ++r) {
                             auto gr = g.row(r);
                             auto out = gx.row(r);
                             for (std::size_t c = 0; c < gr.size(); ++c) out[c] += f[r] * gr[c];
                           }
                         });
}

Var leaky_relu(const Var& x, double slope) {
  Tensor out = leaky_relu(x.value(), slope);
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix, slope](Tape& t, std::size_t self) {
    const Tensor& g = upstream(t, self);
    const Tensor& xv = t.value(ix);
    Tensor& gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += xv[i] > 0.0 ? g[i] : slope * g[i];
  });
}

Var masked_softmax(const Var& logits, const BinaryMatrix& mask, double c) {
  Tensor out = masked_softmax(logits.value(), mask, c);
  const std::size_t il = logits.id();
  return logits.tape().record(std::move(out), {logits}, [il](Tape& t, std::size_t self) {
    // The mask shift is a constant, so the adjoint is the plain softmax one:
    // dz = y * (g - <g, y>) per row.
    const Tensor& g = upstream(t, self);
    const Tensor& y = t.value(self);
    Tensor& gz = t.grad_buffer(il);
    for (std::size_t r = 0; r < y.rows(); ++r) {
      auto yr = y.row(r);
      auto gr = g.row(r);
      auto out = gz.row(r);
      double inner = 0.0;
      for (std::size_t j = 0; j < yr.size(); ++j) inner += gr[j] * yr[j];
      for (std::size_t j = 0; j < yr.size(); ++j) out[j] += yr[j] * (gr[j] - inner);
    }
  });
}

Var segment_softmax(const Var& logits, std::vector<std::size_t> segment_of, std::size_t segments) {
  const Tensor& z = logits.value();
  if (z.size() != segment_of.size()) {
    throw DimensionError("segment_softmax: " + std::to_string(z.size()) + " logits vs " +
                         std::to_string(segment_of.size()) + " segment ids");
  }
  std::vector<double> mx(segments, -std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (segment_of[k] >= segments) throw DimensionError("segment_softmax: segment id out of range");
    mx[segment_of[k]] = std::max(mx[segment_of[k]], z[k]);
  }
  Tensor out(z.shape());
  std::vector<double> total(segments, 0.0);
  for (std::size_t k = 0; k < z.size(); ++k) {
    out[k] = std::exp(z[k] - mx[segment_of[k]]);
    total[segment_of[k]] += out[k];
  }
  for (std::size_t k = 0; k < z.size(); ++k) out[k] /= total[segment_of[k]];
  const std::size_t il = logits.id();
  return logits.tape().record(
      std::move(out), {logits},
      [il, seg = std::move(segment_of), segments](Tape& t, std::size_t self) {
        const Tensor& g = upstream(t, self);
        const Tensor& y = t.value(self);
        std::vector<double> inner(segments, 0.0);
        for (std::size_t k = 0; k < y.size(); ++k) inner[seg[k]] += g[k] * y[k];
        Tensor& gz = t.grad_buffer(il);
        for (std::size_t k = 0; k < y.size(); ++k) gz[k] += y[k] * (g[k] - inner[seg[k]]);
      });
}

Var sparse_matmul(const Var& values, const SparsePattern& pattern, const Var& x, bool transpose) {
  const Tensor& v = values.value();
  const Tensor& xv = x.value();
  if (v.size() != pattern.nnz()) {
    throw DimensionError("sparse_matmul: " + std::to_string(v.size()) + " values for " +
                         std::to_string(pattern.nnz()) + " pattern entries");
  }
  const std::size_t in_rows = transpose ? pattern.rows : pattern.cols;
  const std::size_t out_rows = transpose ? pattern.cols : pattern.rows;
  if (xv.rows() != in_rows) {
    throw DimensionError("sparse_matmul: operand has " + std::to_string(xv.rows()) +
                         " rows, expected " + std::to_string(in_rows));
  }
  const std::size_t width = xv.cols();
  // Entry k maps input row src[k] to output row dst[k].
  const auto* src = transpose ? &pattern.row_index : &pattern.col_index;
  const auto* dst = transpose ? &pattern.col_index : &pattern.row_index;
  Tensor out({out_rows, width});
  const auto& kern = kernels::active();
  for (std::size_t k = 0; k < v.size(); ++k) {
    kern.axpy(v[k], xv.raw() + (*src)[k] * width, out.raw() + (*dst)[k] * width, width);
  }
  const std::size_t iv = values.id(), ix = x.id();
  return values.tape().record(
      std::move(out), {values, x},
      [iv, ix, src = *src, dst = *dst, width](Tape& t, std::size_t self) {
        const Tensor& g = upstream(t, self);
        const auto& kern = kernels::active();
        if (t.requires_grad(iv)) {
          Tensor& gv = t.grad_buffer(iv);
          const Tensor& xv = t.value(ix);
          for (std::size_t k = 0; k < src.size(); ++k) {
            gv[k] += kern.dot(g.raw() + dst[k] * width, xv.raw() + src[k] * width, width);
          }
        }
        if (t.requires_grad(ix)) {
          Tensor& gx = t.grad_buffer(ix);
          const Tensor& vv = t.value(iv);
          for (std::size_t k = 0; k < src.size(); ++k) {
            kern.axpy(vv[k], g.raw() + dst[k] * width, gx.raw() + src[k] * width, width);
          }
        }
      });
}

Var gather_rows(const Var& x, std::vector<std::size_t> index) {
  expect_matrix_rows(x, "gather_rows");
  const Tensor& xv = x.value();
  const std::size_t width = xv.cols();
  if (index.empty()) throw DimensionError("gather_rows: empty index");
  Tensor out({index.size(), width});
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= xv.rows()) throw DimensionError("gather_rows: row index out of range");
    std::copy_n(xv.raw() + index[r] * width, width, out.raw() + r * width);
  }
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix, idx = std::move(index), width](Tape& t, std::size_t self) {
    const Tensor& g = upstream(t, self);
    Tensor& gx = t.grad_buffer(ix);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const double* src = g.raw() + r * width;
      double* dst = gx.raw() + idx[r] * width;
      for (std::size_t c = 0; c < width; ++c) dst[c] += src[c];
    }
  });
}

Var slice_rows(const Var& x, std::size_t begin, std::size_t count) {
  expect_matrix_rows(x, "slice_rows");
  if (count == 0 || begin + count > x.value().rows()) {
    throw DimensionError("slice_rows: [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") outside " + shape_string(x.shape()));
  }
  std::vector<std::size_t> index(count);
  for (std::size_t i = 0; i < count; ++i) index[i] = begin + i;
  return gather_rows(x, std::move(index));
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  const std::size_t width = parts[0].value().cols();
  std::size_t rows = 0;
  for (const Var& p : parts) {
    if (p.value().cols() != width) throw DimensionError("concat_rows: column count mismatch");
    rows += p.value().rows();
  }
  Tensor out({rows, width});
  std::vector<std::size_t> ids;
  std::size_t offset = 0;
  for (const Var& p : parts) {
    std::copy(p.value().values().begin(), p.value().values().end(), out.raw() + offset);
    offset += p.value().size();
    ids.push_back(p.id());
  }
  return parts[0].tape().record(std::move(out), parts, [ids](Tape& t, std::size_t self) {
    const Tensor& g = upstream(t, self);
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      const std::size_t n = t.value(id).size();
      if (t.requires_grad(id)) {
        Tensor& gp = t.grad_buffer(id);
        for (std::size_t i = 0; i < n; ++i) gp[i] += g[offset + i];
      }
      offset += n;
    }
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t rows = parts[0].value().rows();
  std::size_t width = 0;
  for (const Var& p : parts) {
    if (p.value().rows() != rows) throw DimensionError("concat_cols: row count mismatch");
    width += p.value().cols();
  }
  Tensor out({rows, width});
  std::vector<std::size_t> ids;
  std::size_t col = 0;
  for (const Var& p : parts) {
    const Tensor& pv = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(pv.raw() + r * pv.cols(), pv.cols(), out.raw() + r * width + col);
    }
    col += pv.cols();
    ids.push_back(p.id());
  }
  return parts[0].tape().record(std::move(out), parts, [ids, width](Tape& t, std::size_t self) {
    const Tensor& g = upstream(t, self);
    std::size_t col = 0;
    for (std::size_t id : ids) {
      const std::size_t pc = t.value(id).cols();
      if (t.requires_grad(id)) {
        Tensor& gp = t.grad_buffer(id);
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < pc; ++c) gp[r * pc + c] += g[r * width + col + c];
        }
      }
      col += pc;
    }
  });
}

Var reshape(const Var& x, Shape shape) {
  Tensor out = x.value().reshaped(std::move(shape));
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix](Tape& t, std::size_t self) {
    const Tensor& g = upstream(t, self);
    Tensor& gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
  });
}

Var avg_pool_rows(const Var& x, std::size_t window) {
  expect_matrix_rows(x, "avg_pool_rows");
  const Tensor& xv = x.value();
  if (window == 0 || xv.rows() < window) {
    throw DimensionError("avg_pool_rows: window " + std::to_string(window) + " for " +
                         std::to_string(xv.rows()) + " rows");
  }
  const std::size_t out_rows = xv.rows() / window, width = xv.cols();
  const double inv = 1.0 / static_cast<double>(window);
  Tensor out({out_rows, width});
  for (std::size_t o = 0; o < out_rows; ++o) {
    for (std::size_t w = 0; w < window; ++w) {
      const double* src = xv.raw() + (o * window + w) * width;
      for (std::size_t c = 0; c < width; ++c) out.at(o, c) += src[c] * inv;
    }
  }
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix, window, inv](Tape& t, std::size_t self) {
    const Tensor& g = upstream(t, self);
    Tensor& gx = t.grad_buffer(ix);
    const std::size_t width = g.cols();
    for (std::size_t o = 0; o < g.rows(); ++o) {
      for (std::size_t w = 0; w < window; ++w) {
        double* dst = gx.raw() + (o * window + w) * width;
        for (std::size_t c = 0; c < width; ++c) dst[c] += g.at(o, c) * inv;
      }
    }
  });
}

Var max_pool_rows(const Var& x, std::size_t window) {
  expect_matrix_rows(x, "max_pool_rows");
  const Tensor& xv = x.value();
  if (window == 0 || xv.rows() < window) {
    throw DimensionError("max_pool_rows: window " + std::to_string(window) + " for " +
                         std::to_string(xv.rows()) + " rows");
  }
  const std::size_t out_rows = xv.rows() / window, width = xv.cols();
  Tensor out({out_rows, width});
  std::vector<std::size_t> argmax(out_rows * width);
  for (std::size_t o = 0; o < out_rows; ++o) {
    for (std::size_t c = 0; c < width; ++c) {
      std::size_t best = o * window;
      for (std::size_t w = 1; w < window; ++w) {
        if (xv.at(o * window + w, c) > xv.at(best, c)) best = o * window + w;
      }
      out.at(o, c) = xv.at(best, c);
      argmax[o * width + c] = best * width + c;
    }
  }
  const std::size_t ix = x.id();
  return x.tape().record(std::move(out), {x}, [ix, am = std::move(argmax)](Tape& t, std::size_t self) {
    const Tensor& g = upstream(t, self);
    Tensor& gx = t.grad_buffer(ix);
    for (std::size_t i = 0; i < am.size(); ++i) gx[am[i]] += g[i];
  });
}

Var sum(const Var& x) {
  double s = 0.0;
  for (double v : x.value().values()) s += v;
  const std::size_t ix = x.id();
  return x.tape().record(Tensor({1}, std::vector<double>{s}), {x}, [ix](Tape& t, std::size_t self) {
    const double g = upstream(t, self)[0];
    for (auto& v : t.grad_buffer(ix).values()) v += g;
  });
}

Var mse(const Var& pred, const Tensor& target) {
  const Tensor& p = pred.value();
  if (p.shape() != target.shape()) {
    throw DimensionError("mse: prediction " + shape_string(p.shape()) + " vs target " +
                         shape_string(target.shape()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - target[i];
    s += d * d;
  }
  const double inv = 1.0 / static_cast<double>(p.size());
  const std::size_t ip = pred.id();
  return pred.tape().record(Tensor({1}, std::vector<double>{s * inv}), {pred},
                            [ip, target, inv](Tape& t, std::size_t self) {
                              const double g = upstream(t, self)[0];
                              const Tensor& p = t.value(ip);
                              Tensor& gp = t.grad_buffer(ip);
                              for (std::size_t i = 0; i < p.size(); ++i) {
                                gp[i] += 2.0 * inv * g * (p[i] - target[i]);
                              }
                            });
}

Linear::Linear(const std::string& name, std::size_t in_dim, std::size_t out_dim)
    : weight(name + ".weight", {in_dim, out_dim}), bias(name + ".bias", {1, out_dim}) {}

Var linear(const Var& x, Linear& layer) {
  Tape& t = x.tape();
  return add_bias(matmul(x, t.param(layer.weight)), t.param(layer.bias));
}

Var mlp_forward(const Var& x, std::span<Linear> layers, double slope) {
  if (layers.empty()) throw DimensionError("mlp_forward: no layers");
  Var h = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (h.value().cols() != layers[i].in()) {
      throw DimensionError("mlp_forward: layer " + std::to_string(i) + " expects width " +
                           std::to_string(layers[i].in()) + ", got " +
                           std::to_string(h.value().cols()));
    }
    h = linear(h, layers[i]);
    if (i + 1 < layers.size()) h = leaky_relu(h, slope);
  }
  return h;
}

Tensor mlp_forward(const Tensor& x, std::span<Linear> layers, double slope) {
  Tape tape(/*track_gradients=*/false);
  return mlp_forward(tape.constant(x), layers, slope).value();
}

}  // namespace mshyper
