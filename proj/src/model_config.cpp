#include "mshyper/model_config.hpp"

#include "mshyper/error.hpp"
#include "mshyper/mfe.hpp"

namespace mshyper {

std::string to_string(Aggregation mode) {
  switch (mode) {
    case Aggregation::kConv:
      return "conv";
    case Aggregation::kAverage:
      return "avg";
    case Aggregation::kMax:
      return "max";
  }
  return "unknown";
}

Aggregation parse_aggregation(const std::string& text) {
  if (text == "conv") return Aggregation::kConv;
  if (text == "avg") return Aggregation::kAverage;
  if (text == "max") return Aggregation::kMax;
  throw ConfigError("model.aggregation: expected one of conv, avg, max; got '" + text + "'");
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError(field + ": " + why);
  };
  if (input_len < 2) fail("model.input_len", "must be at least 2");
  if (horizon == 0) fail("model.horizon", "must be positive");
  if (variables == 0) fail("model.variables", "must be positive");
  if (hyperedge_sizes.size() != scales()) {
    fail("model.hyperedge_sizes", "needs one entry per scale (" + std::to_string(scales()) +
                                      "), got " + std::to_string(hyperedge_sizes.size()));
  }
  for (auto h : hyperedge_sizes) {
    if (h < 2) fail("model.hyperedge_sizes", "every size must be at least 2");
  }
  if (hop == 0) fail("model.hop", "must be at least 1");
  if (d_model == 0) fail("model.d_model", "must be positive");
  if (heads == 0 || d_model % heads != 0) {
    fail("model.heads", "must divide d_model (" + std::to_string(d_model) + ")");
  }
  if (embed_layers == 0) fail("model.embed_layers", "must be at least 1");
  if (blocks == 0) fail("model.blocks", "must be at least 1");
  if (!(mask_constant > 0.0)) fail("model.mask_constant", "must be positive");
  if (!kinds.intra && !kinds.inter && !kinds.mixed) {
    fail("model.hyperedges", "at least one hyperedge family must be enabled");
  }
  try {
    plan_scales(input_len, windows);
  } catch (const ConfigError& e) {
    fail("model.windows", e.what());
  }
}

}  // namespace mshyper
