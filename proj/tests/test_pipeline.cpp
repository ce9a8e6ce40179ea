#include <gtest/gtest.h>

#include <cmath>

#include "mshyper/dataset.hpp"
#include "mshyper/error.hpp"
#include "mshyper/synthetic.hpp"
#include "mshyper/training.hpp"
#include "support.hpp"

namespace mshyper {
namespace {

Dataset ramp(std::size_t rows, std::size_t cols = 1) {
  Dataset d;
  d.name = "ramp";
  d.values = Tensor({rows, cols});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) d.values.at(r, c) = double(r + 1) + 100.0 * double(c);
  }
  return d;
}

TEST(Csv, NumericColumns) {
  std::string text = "a,b\n";
  for (int i = 0; i < 10; ++i) text += std::to_string(i) + "," + std::to_string(2 * i) + "\n";
  Dataset d = parse_csv(text, "t");
  EXPECT_EQ(d.rows(), 10u);
  EXPECT_EQ(d.variables(), 2u);
  EXPECT_EQ(d.columns, (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(d.timestamps.empty());
  EXPECT_EQ(d.values.at(9, 1), 18.0);
}

TEST(Csv, LeadingDateColumnIsALabel) {
  Dataset d = parse_csv("date,x\n2020-01-01 00:00,1.5\n2020-01-01 01:00,2.5\n", "t");
  EXPECT_EQ(d.variables(), 1u);
  EXPECT_EQ(d.timestamps.size(), 2u);
  EXPECT_EQ(d.values.at(1, 0), 2.5);
}

TEST(Csv, Errors) {
  EXPECT_THROW(parse_csv("", "t"), LoadError);
  EXPECT_THROW(parse_csv("a,b\n", "t"), LoadError);
  EXPECT_THROW(parse_csv("a,b\n1,2\n3\n", "t"), FormatError);
  try {
    parse_csv("a,b\n1,2\n3,oops\n", "t");
    FAIL();
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("oops"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_csv("/nonexistent/file.csv"), LoadError);
}

TEST(Split, SeventyTwentyTen) {
  Dataset d = ramp(100);
  Splits s = chronological_split(d, SplitSpec{});
  EXPECT_EQ(s.train.rows(), 70u);
  EXPECT_EQ(s.val.rows(), 20u);
  EXPECT_EQ(s.test.rows(), 10u);
  EXPECT_EQ(s.train.values.at(69, 0), 70.0);
  EXPECT_EQ(s.val.values.at(0, 0), 71.0);
  EXPECT_EQ(s.test.values.at(0, 0), 91.0);
}

TEST(Split, SixtyTwentyTwentyAndRemainder) {
  Splits s = chronological_split(ramp(1000), SplitSpec{0.6, 0.2, 0.2});
  EXPECT_EQ(s.train.rows(), 600u);
  EXPECT_EQ(s.val.rows(), 200u);
  EXPECT_EQ(s.test.rows(), 200u);
  Splits odd = chronological_split(ramp(17), SplitSpec{});
  EXPECT_EQ(odd.train.rows() + odd.val.rows() + odd.test.rows(), 17u);
  EXPECT_EQ(odd.train.rows(), 11u);
  EXPECT_EQ(odd.val.rows(), 3u);
}

TEST(Split, Validation) {
  EXPECT_THROW(chronological_split(ramp(100), SplitSpec{}, 11), SplitError);
  EXPECT_THROW((SplitSpec{0.5, 0.2, 0.2}).validate(), ConfigError);
  EXPECT_THROW((SplitSpec{0.8, 0.3, -0.1}).validate(), ConfigError);
}

TEST(Normalize, HandValues) {
  Normalized n = instance_normalize(Tensor::matrix(2, 1, {0, 2}));
  EXPECT_NEAR(n.values.at(0, 0), -1.0 / (1.0 + kNormEpsilon), 1e-15);
  EXPECT_NEAR(n.values.at(1, 0), 1.0 / (1.0 + kNormEpsilon), 1e-15);
  Normalized flat = instance_normalize(Tensor({5, 1}, 3.0));
  for (double v : flat.values.values()) EXPECT_EQ(v, 0.0);
}

TEST(Normalize, RoundTrip) {
  Dataset d = make_synthetic(SyntheticSpec{200, 3, {24.0}, 0.1, 3});
  Normalized n = instance_normalize(d.values);
  EXPECT_LT(testing::max_abs_diff(denormalize(n.values, n.stats), d.values), 1e-6);
  EXPECT_EQ(apply_normalization(d.values, n.stats), n.values);
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < 200; ++r) mean += n.values.at(r, c);
    EXPECT_NEAR(mean / 200.0, 0.0, 1e-12);
  }
}

TEST(Windows, CountsAndOffsets) {
  EXPECT_EQ(window_count(10, 4, 2), 5u);
  EXPECT_EQ(window_count(10, 4, 2, 10), 1u);
  EXPECT_EQ(window_count(6, 4, 2), 1u);
  EXPECT_THROW(window_count(5, 4, 2), SplitError);
  auto w = make_windows(ramp(10), 4, 2);
  ASSERT_EQ(w.size(), 5u);
  EXPECT_EQ(w[2].offset, 2u);
  EXPECT_EQ(w[2].input, Tensor::matrix(4, 1, {3, 4, 5, 6}));
  EXPECT_EQ(w[2].target, Tensor::matrix(2, 1, {7, 8}));
}

TEST(Metrics, HandValues) {
  MetricAccumulator m;
  m.add(Tensor::matrix(2, 1, {1, 2}), Tensor::matrix(2, 1, {0, 2}));
  EXPECT_DOUBLE_EQ(m.result().mse, 0.5);
  EXPECT_DOUBLE_EQ(m.result().mae, 0.5);
  EXPECT_EQ(m.count(), 2u);
}

TEST(NaiveBaseline, RampAndConstant) {
  // Last observed value repeated: errors 1, 2, .., h on a unit ramp.
  Metrics r = naive_baseline(ramp(20), 4, 2);
  EXPECT_DOUBLE_EQ(r.mse, 2.5);
  EXPECT_DOUBLE_EQ(r.mae, 1.5);
  Dataset flat;
  flat.values = Tensor({12, 2}, 4.0);
  EXPECT_EQ(naive_baseline(flat, 4, 3).mse, 0.0);
}

ModelConfig small_model(std::size_t variables = 1) {
  ModelConfig cfg;
  cfg.input_len = 16;
  cfg.horizon = 4;
  cfg.variables = variables;
  cfg.windows = {2, 2};
  cfg.hyperedge_sizes = {2, 2, 2};
  cfg.hop = 2;
  cfg.d_model = 8;
  cfg.heads = 2;
  return cfg;
}

class SmallTraining : public ::testing::Test {
 protected:
  ModelConfig cfg = small_model(2);
  Splits splits = chronological_split(make_synthetic(SyntheticSpec{240, 2, {12.0, 48.0}, 0.05, 11}), SplitSpec{},
                                      cfg.input_len + cfg.horizon);
  TrainSettings settings() const {
    TrainSettings s;
    s.batch_size = 16;
    s.epochs = 3;
    s.adam.learning_rate = 1e-3;
    s.seed = 9;
    return s;
  }
};

TEST_F(SmallTraining, ZeroLearningRateKeepsParameters) {
  TrainSettings s = settings();
  s.adam.learning_rate = 0.0;
  s.patience = 10;
  ModelParams init = init_params(cfg, s.seed);
  TrainResult r = train_from(init, splits.train, splits.val, cfg, s);
  ASSERT_EQ(r.history.size(), 3u);
  for (const auto& e : r.history) {
    EXPECT_EQ(e.train_mse, r.history[0].train_mse);
    EXPECT_EQ(e.val_mse, r.history[0].val_mse);
  }
  auto a = init.all(), b = r.params.all();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i]->value, b[i]->value);
}

TEST_F(SmallTraining, SeededRunsAreIdentical) {
  TrainResult a = train(splits.train, splits.val, cfg, settings());
  TrainResult b = train(splits.train, splits.val, cfg, settings());
  EXPECT_EQ(history_csv(a.history), history_csv(b.history));
  auto pa = a.params.all(), pb = b.params.all();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i]->value, pb[i]->value);
}

TEST_F(SmallTraining, LossDecreasesAndBestIsKept) {
  TrainSettings s = settings();
  s.epochs = 4;
  std::vector<EpochRecord> seen;
  TrainResult r = train(splits.train, splits.val, cfg, s, [&](const EpochRecord& e) { seen.push_back(e); });
  ASSERT_EQ(seen.size(), r.history.size());
  EXPECT_LT(r.history.back().train_mse, r.history.front().train_mse);
  double best = 1e300;
  std::size_t best_epoch = 0;
  for (const auto& e : r.history) {
    if (e.val_mse < best) {
      best = e.val_mse;
      best_epoch = e.epoch;
    }
  }
  EXPECT_EQ(r.best_epoch, best_epoch);
  GraphBundle g = GraphBundle::build(cfg);
  EXPECT_NEAR(evaluate(r.params, splits.val, cfg, g).mse, best, 1e-9 * std::max(1.0, best));
}

TEST_F(SmallTraining, EarlyStoppingOnFlatValidation) {
  TrainSettings s = settings();
  s.adam.learning_rate = 0.0;
  s.epochs = 10;
  s.patience = 2;
  TrainResult r = train(splits.train, splits.val, cfg, s);
  EXPECT_TRUE(r.stopped_early);
  EXPECT_EQ(r.history.size(), 3u);
  EXPECT_EQ(r.best_epoch, 1u);
}

TEST_F(SmallTraining, ForecastIsOnRawScale) {
  ModelParams p = init_params(cfg, 1);
  GraphBundle g = GraphBundle::build(cfg);
  // Zero head: the normalized forecast is 0, i.e. the window mean.
  for (auto* t : p.all()) {
    if (t->name.rfind("head.", 0) == 0) t->value.fill(0.0);
  }
  Tensor window = splits.test.slice(0, cfg.input_len, "w").values;
  Tensor out = forecast(window, cfg, p, g);
  Normalized n = instance_normalize(window);
  for (std::size_t r = 0; r < cfg.horizon; ++r) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(out.at(r, c), n.stats.mean[c], 1e-12);
  }
}

TEST(Formatting, Lines) {
  EXPECT_EQ(format_epoch_line({3, 0.5, 0.25}), "3\t0.500000\t0.250000");
  EXPECT_EQ(format_test_line({0.125, 0.25}), "test\t0.125000\t0.250000");
  EXPECT_EQ(history_csv({{1, 0.5, 0.25}}), "epoch,train_mse,val_mse\n1,0.500000,0.250000\n");
}

TEST(Synthetic, DeterministicAndShaped) {
  SyntheticSpec s;
  s.steps = 50;
  s.variables = 3;
  Dataset a = make_synthetic(s), b = make_synthetic(s);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.values.shape(), (Shape{50, 3}));
  EXPECT_EQ(parse_csv(to_csv(a), "x").values, a.values);
}

}  // namespace
}  // namespace mshyper
