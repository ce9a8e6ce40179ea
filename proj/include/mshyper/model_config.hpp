#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mshyper {

enum class Aggregation { kConv, kAverage, kMax };

std::string to_string(Aggregation mode);
Aggregation parse_aggregation(const std::string& text);

// Which hyperedge families enter the hypergraph.
struct HyperedgeKinds {
  bool intra = true;
  bool inter = true;
  bool mixed = true;

  friend bool operator==(const HyperedgeKinds&, const HyperedgeKinds&) = default;
};

// Structural hyperparameters of the forecaster.
struct ModelConfig {
  std::size_t input_len = 96;       // T
  std::size_t horizon = 96;         // forecast steps
  std::size_t variables = 1;        // raw feature count D
  std::vector<std::size_t> windows{4, 4, 4};  // aggregation window per scale transition (S - 1)
  std::vector<std::size_t> hyperedge_sizes{4, 4, 4, 4};  // nodes per hyperedge per scale (S)
  std::size_t hop = 3;              // k of the k-hop families
  std::size_t d_model = 64;
  std::size_t heads = 4;            // J
  std::size_t embed_layers = 2;
  std::size_t blocks = 1;
  double mask_constant = 1e9;       // C
  Aggregation aggregation = Aggregation::kConv;
  HyperedgeKinds kinds;

  std::size_t scales() const { return windows.size() + 1; }

  // Throws ConfigError naming the offending field. Includes the scale-plan
  // horizon underflow check.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

}  // namespace mshyper
