#pragma once

// Multi-scale feature extraction: per-scale horizons, the global node
// numbering, and the embedding + aggregation pipeline that produces the
// node matrix.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mshyper/autodiff.hpp"
#include "mshyper/model_config.hpp"

namespace mshyper {

// Global node ids are 1-based.
using NodeId = std::size_t;

struct ScalePlan {
  std::size_t input_len = 0;
  std::vector<std::size_t> windows;   // l^1 .. l^{S-1}
  std::vector<std::size_t> horizons;  // h^1 .. h^S

  std::size_t scales() const { return horizons.size(); }
  std::size_t node_count() const;
  // 1-based scale accessors.
  std::size_t horizon(std::size_t scale) const { return horizons[scale - 1]; }
  std::size_t window(std::size_t scale) const { return windows[scale - 1]; }
};

// h^1 = T, h^s = floor(h^{s-1} / l^{s-1}). Throws ConfigError when T == 0, a
// window is below 2, or some horizon reaches 0.
ScalePlan plan_scales(std::size_t input_len, std::span<const std::size_t> windows);

// Scale-major numbering: scale 1 positions 1..h^1 get ids 1..h^1, scale 2
// follows, and so on. Scales and positions are 1-based.
class NodeIndex {
 public:
  NodeIndex() = default;
  explicit NodeIndex(ScalePlan plan);

  const ScalePlan& plan() const { return plan_; }
  std::size_t node_count() const { return total_; }
  std::size_t scales() const { return plan_.scales(); }
  // Number of ids preceding scale `scale`.
  std::size_t offset(std::size_t scale) const { return offsets_[scale - 1]; }

  NodeId id(std::size_t scale, std::size_t position) const;
  std::pair<std::size_t, std::size_t> locate(NodeId id) const;

 private:
  ScalePlan plan_;
  std::vector<std::size_t> offsets_;
  std::size_t total_ = 0;
};

// Learnable pieces of feature extraction.
struct MfeParams {
  std::vector<Linear> embed;  // D -> d_model MLP
  std::vector<Linear> conv;   // per scale transition: (l * d_model) -> d_model
};

// Strided aggregation with kernel = stride = window; the trailing h mod l
// rows are dropped. Conv mode needs `conv` with input width window * cols.
Var aggregate(const Var& x, std::size_t window, Aggregation mode, Linear* conv);

struct MultiScaleSeries {
  NodeIndex index;
  std::vector<Var> scales;  // X^s, h^s x d_model
  Var nodes;                // all scales stacked in id order, N x d_model
};

// Embeds the T x D window to d_model, then aggregates scale by scale.
MultiScaleSeries build_multiscale(const Var& window, const ModelConfig& cfg, MfeParams& params);

}  // namespace mshyper
