#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mshyper/dataset.hpp"
#include "mshyper/param.hpp"
#include "mshyper/tmp.hpp"

namespace mshyper {

struct TrainSettings {
  std::size_t batch_size = 32;
  AdamSettings adam;
  std::size_t epochs = 10;
  std::size_t patience = 3;
  std::uint64_t seed = 2024;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_mse = 0.0;  // mean normalized-space loss over training windows
  double val_mse = 0.0;    // de-normalized validation MSE
};

struct TrainResult {
  ModelParams params;  // best on validation
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Minibatch Adam on the normalized-space MSE. Per-sample gradients are
// reduced in a fixed order so a seeded run is bit-reproducible. Stops after
// `patience` epochs without a validation improvement and returns the best
// parameters. Throws TrainingError naming epoch and batch on a non-finite loss.
TrainResult train(const Dataset& train_split, const Dataset& val_split, const ModelConfig& cfg,
                  const TrainSettings& settings, const EpochCallback& on_epoch = {});

// Same, starting from existing parameters.
TrainResult train_from(ModelParams initial, const Dataset& train_split, const Dataset& val_split,
                       const ModelConfig& cfg, const TrainSettings& settings,
                       const EpochCallback& on_epoch = {});

// Normalizes a raw T x D input, runs the model, and maps the prediction back
// to the raw scale.
Tensor forecast(const Tensor& raw_input, const ModelConfig& cfg, ModelParams& params,
                const GraphBundle& graphs);

// MSE and MAE over every stride-1 window and variable, on the raw scale.
Metrics evaluate(ModelParams& params, const Dataset& split, const ModelConfig& cfg,
                 const GraphBundle& graphs);

std::string format_epoch_line(const EpochRecord& r);
std::string format_test_line(const Metrics& m);
std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace mshyper
