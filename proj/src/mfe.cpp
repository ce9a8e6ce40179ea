#include "mshyper/mfe.hpp"

#include <algorithm>

#include "mshyper/error.hpp"

namespace mshyper {

std::size_t ScalePlan::node_count() const {
  std::size_t n = 0;
  for (auto h : horizons) n += h;
  return n;
}

ScalePlan plan_scales(std::size_t input_len, std::span<const std::size_t> windows) {
  if (input_len == 0) throw ConfigError("input length must be at least 1");
  ScalePlan plan;
  plan.input_len = input_len;
  plan.windows.assign(windows.begin(), windows.end());
  plan.horizons.push_back(input_len);
  for (std::size_t s = 0; s < windows.size(); ++s) {
    if (windows[s] < 2) {
      throw ConfigError("aggregation window " + std::to_string(s + 1) + " must be at least 2");
    }
    const std::size_t next = plan.horizons.back() / windows[s];
    if (next == 0) {
      throw ConfigError("horizon underflow: scale " + std::to_string(s + 2) + " has length 0 (" +
                        std::to_string(plan.horizons.back()) + " steps / window " +
                        std::to_string(windows[s]) + ")");
    }
    plan.horizons.push_back(next);
  }
  return plan;
}

NodeIndex::NodeIndex(ScalePlan plan) : plan_(std::move(plan)) {
  for (auto h : plan_.horizons) {
    offsets_.push_back(total_);
    total_ += h;
  }
}

NodeId NodeIndex::id(std::size_t scale, std::size_t position) const {
  if (scale < 1 || scale > scales() || position < 1 || position > plan_.horizon(scale)) {
    throw DimensionError("node index: (" + std::to_string(scale) + ", " + std::to_string(position) +
                         ") out of range");
  }
  return offsets_[scale - 1] + position;
}

std::pair<std::size_t, std::size_t> NodeIndex::locate(NodeId id) const {
  if (id < 1 || id > total_) throw DimensionError("node index: id " + std::to_string(id) + " out of range");
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), id - 1);
  const std::size_t scale = static_cast<std::size_t>(it - offsets_.begin());
  return {scale, id - offsets_[scale - 1]};
}

Var aggregate(const Var& x, std::size_t window, Aggregation mode, Linear* conv) {
  const std::size_t rows = x.value().rows();
  const std::size_t width = x.value().cols();
  if (window == 0 || rows < window) {
    throw ConfigError("aggregate: " + std::to_string(rows) + " steps cannot fill window " +
                      std::to_string(window));
  }
  switch (mode) {
    case Aggregation::kAverage:
      return avg_pool_rows(x, window);
    case Aggregation::kMax:
      return max_pool_rows(x, window);
    case Aggregation::kConv: {
      if (conv == nullptr || conv->in() != window * width || conv->out() != width) {
        throw DimensionError("aggregate: convolution weights do not match window " +
                             std::to_string(window) + " and width " + std::to_string(width));
      }
      const std::size_t out_rows = rows / window;
      Var kept = out_rows * window == rows ? x : slice_rows(x, 0, out_rows * window);
      return linear(reshape(kept, {out_rows, window * width}), *conv);
    }
  }
  throw ConfigError("aggregate: unknown mode");
}

MultiScaleSeries build_multiscale(const Var& window, const ModelConfig& cfg, MfeParams& params) {
  if (window.value().rows() != cfg.input_len || window.value().cols() != cfg.variables) {
    throw DimensionError("build_multiscale: window " + shape_string(window.shape()) +
                         " does not match input_len x variables = " +
                         std::to_string(cfg.input_len) + "x" + std::to_string(cfg.variables));
  }
  MultiScaleSeries ms;
  ms.index = NodeIndex(plan_scales(cfg.input_len, cfg.windows));
  ms.scales.push_back(mlp_forward(window, params.embed));
  for (std::size_t s = 0; s + 1 < ms.index.scales(); ++s) {
    Linear* conv = cfg.aggregation == Aggregation::kConv ? &params.conv.at(s) : nullptr;
    ms.scales.push_back(aggregate(ms.scales.back(), cfg.windows[s], cfg.aggregation, conv));
  }
  ms.nodes = ms.scales.size() == 1 ? ms.scales[0] : concat_rows(ms.scales);
  return ms;
}

}  // namespace mshyper
