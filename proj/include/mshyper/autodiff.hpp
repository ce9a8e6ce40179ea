#pragma once

// Reverse-mode accumulation over a recorded operation tape.
//
// A Tape owns every intermediate value produced while building a loss. Ops
// take Var handles and append a node holding the forward value plus a
// closure that pushes the node's adjoint into its parents. backward() sweeps
// the tape in reverse and finally adds the adjoint of every param() leaf into
// ParamTensor::grad. A tape is single-use and must not be shared between
// threads while recording or sweeping.

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

#include "mshyper/ops.hpp"
#include "mshyper/param.hpp"
#include "mshyper/tensor.hpp"

namespace mshyper {

class Tape;

class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  // With track_gradients off, param() yields constants and no adjoint
  // closures are kept (inference only).
  explicit Tape(bool track_gradients = true) : track_gradients_(track_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Value that never receives a gradient.
  Var constant(Tensor value);
  // Free leaf whose gradient can be read with grad() after backward().
  Var leaf(Tensor value);
  // Leaf bound to a parameter; backward() adds its adjoint into p.grad.
  Var param(ParamTensor& p);

  const Tensor& value(const Var& v) const { return nodes_[v.id()].value; }
  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Gradient of the last backward() output with respect to v (zeros if v was
  // not reached).
  Tensor grad(const Var& v) const;

  // Reverse sweep from a single-element output, seeded with `seed`.
  void backward(const Var& output, double seed = 1.0);

  std::size_t size() const { return nodes_.size(); }

  // Op-implementation interface.
  Var record(Tensor value, std::initializer_list<Var> parents, BackwardFn fn);
  Var record(Tensor value, std::span<const Var> parents, BackwardFn fn);
  // Adjoint buffer of node `id`, allocated as zeros on first access.
  Tensor& grad_buffer(std::size_t id);
  bool has_grad(std::size_t id) const { return !nodes_[id].grad.empty(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    ParamTensor* param = nullptr;
    BackwardFn backward;
  };

  std::deque<Node> nodes_;
  bool track_gradients_ = true;
};

inline const Tensor& Var::value() const { return tape_->value(*this); }

// Row-major COO pattern for an rows x cols sparse matrix whose entry k sits at
// (row_index[k], col_index[k]).
struct SparsePattern {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_index;
  std::vector<std::size_t> col_index;

  std::size_t nnz() const { return row_index.size(); }
};

Var matmul(const Var& a, const Var& b);
Var matmul_nt(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
// x[n x c] + bias[1 x c] broadcast over rows.
Var add_bias(const Var& x, const Var& bias);
Var mul(const Var& a, const Var& b);
Var scale(const Var& x, double factor);
// Row r multiplied by factors[r].
Var scale_rows(const Var& x, std::vector<double> factors);
Var leaky_relu(const Var& x, double slope = kLeakySlope);
Var masked_softmax(const Var& logits, const BinaryMatrix& mask, double c);
// Softmax of a column of logits within each segment; entry k belongs to
// segment segment_of[k].
Var segment_softmax(const Var& logits, std::vector<std::size_t> segment_of, std::size_t segments);
// values is nnz x 1. Returns S * x, or S^T * x when transpose is set.
Var sparse_matmul(const Var& values, const SparsePattern& pattern, const Var& x, bool transpose);
Var gather_rows(const Var& x, std::vector<std::size_t> index);
Var slice_rows(const Var& x, std::size_t begin, std::size_t count);
Var concat_rows(std::span<const Var> parts);
Var concat_cols(std::span<const Var> parts);
Var reshape(const Var& x, Shape shape);
// Non-overlapping row windows of length `window`; trailing rows dropped.
Var avg_pool_rows(const Var& x, std::size_t window);
Var max_pool_rows(const Var& x, std::size_t window);
Var sum(const Var& x);
// Mean over all entries of (pred - target)^2, returned as a one-element tensor.
Var mse(const Var& pred, const Tensor& target);

struct Linear {
  ParamTensor weight;  // in x out
  ParamTensor bias;    // 1 x out

  Linear() = default;
  Linear(const std::string& name, std::size_t in, std::size_t out);
  std::size_t in() const { return weight.shape()[0]; }
  std::size_t out() const { return weight.shape()[1]; }
};

Var linear(const Var& x, Linear& layer);

// Affine layers with LeakyReLU between them; the last layer is affine only.
Var mlp_forward(const Var& x, std::span<Linear> layers, double slope = kLeakySlope);
Tensor mlp_forward(const Tensor& x, std::span<Linear> layers, double slope = kLeakySlope);

}  // namespace mshyper
