#pragma once

// Data protocol: CSV ingestion, chronological splits, per-window instance
// normalization and sliding windows.

#include <cstddef>
#include <string>
#include <vector>

#include "mshyper/tensor.hpp"

namespace mshyper {

struct Dataset {
  std::string name;
  Tensor values;                       // rows x D
  std::vector<std::string> timestamps;  // empty when the file had no label column
  std::vector<std::string> columns;     // variable names from the header
  std::string frequency;

  std::size_t rows() const { return values.empty() ? 0 : values.rows(); }
  std::size_t variables() const { return values.empty() ? 0 : values.cols(); }
  // Contiguous row range [begin, begin + count) as a new dataset.
  Dataset slice(std::size_t begin, std::size_t count, const std::string& suffix) const;
};

// Header row required. The first column is treated as a timestamp label when
// its first data cell does not parse as a number; the rest are parsed as
// doubles. Throws LoadError on unreadable/empty files, unparsable or empty
// cells (with row and column) and FormatError on ragged rows.
Dataset load_csv(const std::string& path);
Dataset parse_csv(const std::string& text, const std::string& name);

struct SplitSpec {
  double train = 0.7;
  double val = 0.2;
  double test = 0.1;

  // Throws ConfigError unless every part is positive and they sum to 1.
  void validate() const;
};

struct Splits {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Prefix / middle / suffix with floor(ratio * rows) rows for train and val,
// the remainder for test. Throws SplitError when any part has fewer than
// min_rows rows.
Splits chronological_split(const Dataset& d, const SplitSpec& spec, std::size_t min_rows = 1);

inline constexpr double kNormEpsilon = 1e-5;

struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population standard deviation
};

struct Normalized {
  Tensor values;
  NormStats stats;
};

// Per-column (x - mean) / (std + 1e-5) over the window rows.
Normalized instance_normalize(const Tensor& window);
// Inverse map for any tensor with the same column count.
Tensor denormalize(const Tensor& values, const NormStats& stats);
// Forward map with previously computed stats.
Tensor apply_normalization(const Tensor& values, const NormStats& stats);

struct WindowPair {
  std::size_t offset = 0;
  Tensor input;   // rows [offset, offset + T)
  Tensor target;  // rows [offset + T, offset + T + horizon)
};

// floor((rows - T - horizon) / stride) + 1 windows. Throws SplitError when
// rows < T + horizon.
std::size_t window_count(std::size_t rows, std::size_t input_len, std::size_t horizon,
                         std::size_t stride = 1);
std::vector<WindowPair> make_windows(const Dataset& split, std::size_t input_len, std::size_t horizon,
                                     std::size_t stride = 1);

struct Metrics {
  double mse = 0.0;
  double mae = 0.0;
};

// Accumulates squared and absolute errors over every entry.
class MetricAccumulator {
 public:
  void add(const Tensor& pred, const Tensor& truth);
  Metrics result() const;
  std::size_t count() const { return count_; }

 private:
  double squared_ = 0.0;
  double absolute_ = 0.0;
  std::size_t count_ = 0;
};

// Repeats each window's last observed row across the horizon.
Metrics naive_baseline(const Dataset& split, std::size_t input_len, std::size_t horizon);

}  // namespace mshyper
