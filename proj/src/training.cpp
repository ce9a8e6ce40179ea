#include "mshyper/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "mshyper/error.hpp"

namespace mshyper {
namespace {

struct PreparedWindow {
  Tensor input;   // normalized
  Tensor target;  // normalized with the input statistics
};

std::vector<PreparedWindow> prepare(const Dataset& split, const ModelConfig& cfg) {
  std::vector<PreparedWindow> out;
  for (auto& w : make_windows(split, cfg.input_len, cfg.horizon)) {
    Normalized n = instance_normalize(w.input);
    out.push_back({std::move(n.values), apply_normalization(w.target, n.stats)});
  }
  return out;
}

void check_dataset(const Dataset& d, const ModelConfig& cfg) {
  if (d.variables() != cfg.variables) {
    throw ConfigError("model.variables is " + std::to_string(cfg.variables) + " but dataset '" + d.name +
                      "' has " + std::to_string(d.variables()) + " columns");
  }
}

}  // namespace

TrainResult train(const Dataset& train_split, const Dataset& val_split, const ModelConfig& cfg,
                  const TrainSettings& settings, const EpochCallback& on_epoch) {
  return train_from(init_params(cfg, settings.seed), train_split, val_split, cfg, settings, on_epoch);
}

TrainResult train_from(ModelParams initial, const Dataset& train_split, const Dataset& val_split,
                       const ModelConfig& cfg, const TrainSettings& settings,
                       const EpochCallback& on_epoch) {
  cfg.validate();
  check_dataset(train_split, cfg);
  check_dataset(val_split, cfg);
  if (settings.batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (settings.epochs == 0) throw ConfigError("train.epochs must be positive");

  const GraphBundle graphs = GraphBundle::build(cfg);
  const std::vector<PreparedWindow> windows = prepare(train_split, cfg);
  make_windows(val_split, cfg.input_len, cfg.horizon);  // fail fast on a short validation split

  TrainResult result;
  ModelParams params = std::move(initial);
  auto all = params.all();
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(settings.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<double> window_loss(windows.size());
  std::uint64_t step = 0;
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= settings.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0, batch = 1; start < order.size(); start += settings.batch_size, ++batch) {
      const std::size_t end = std::min(order.size(), start + settings.batch_size);
      const double seed = 1.0 / static_cast<double>(end - start);
      params.zero_grad();
      try {
        for (std::size_t i = start; i < end; ++i) {
          const PreparedWindow& w = windows[order[i]];
          Tape tape;
          ForwardState state = forward(tape, w.input, cfg, params, graphs);
          Var loss = mse_loss(state.prediction, w.target);
          window_loss[order[i]] = loss.value()[0];
          tape.backward(loss, seed);
        }
        ++step;
        for (ParamTensor* p : all) adam_step(*p, settings.adam, step);
      } catch (const NumericError& e) {
        throw TrainingError("non-finite value in epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batch) + ": " + e.what());
      }
    }
    EpochRecord rec;
    rec.epoch = epoch;
    // Summed in window order so the figure does not depend on the shuffle.
    rec.train_mse = std::accumulate(window_loss.begin(), window_loss.end(), 0.0) /
                    static_cast<double>(window_loss.size());
    rec.val_mse = evaluate(params, val_split, cfg, graphs).mse;
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (rec.val_mse < best) {
      best = rec.val_mse;
      result.params = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= settings.patience) {
      result.stopped_early = epoch < settings.epochs;
      break;
    }
  }
  if (result.best_epoch == 0) {
    result.params = params;
    result.best_epoch = result.history.size();
  }
  return result;
}

Tensor forecast(const Tensor& raw_input, const ModelConfig& cfg, ModelParams& params, const GraphBundle& graphs) {
  Normalized n = instance_normalize(raw_input);
  Tape tape(/*track_gradients=*/false);
  ForwardState state = forward(tape, n.values, cfg, params, graphs);
  return denormalize(state.prediction.value(), n.stats);
}

Metrics evaluate(ModelParams& params, const Dataset& split, const ModelConfig& cfg, const GraphBundle& graphs) {
  check_dataset(split, cfg);
  MetricAccumulator acc;
  for (const auto& w : make_windows(split, cfg.input_len, cfg.horizon)) {
    acc.add(forecast(w.input, cfg, params, graphs), w.target);
  }
  return acc.result();
}

std::string format_epoch_line(const EpochRecord& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu\t%.6f\t%.6f", r.epoch, r.train_mse, r.val_mse);
  return buf;
}

std::string format_test_line(const Metrics& m) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "test\t%.6f\t%.6f", m.mse, m.mae);
  return buf;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream out;
  out << "epoch,train_mse,val_mse\n";
  char buf[128];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f\n", r.epoch, r.train_mse, r.val_mse);
    out << buf;
  }
  return out.str();
}

}  // namespace mshyper
