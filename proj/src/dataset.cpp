#include "mshyper/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mshyper/error.hpp"

namespace mshyper {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

}  // namespace

Dataset Dataset::slice(std::size_t begin, std::size_t count, const std::string& suffix) const {
  if (count == 0 || begin + count > rows()) {
    throw SplitError("dataset slice [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                     ") outside " + std::to_string(rows()) + " rows");
  }
  Dataset out;
  out.name = name + suffix;
  out.columns = columns;
  out.frequency = frequency;
  const std::size_t width = variables();
  std::vector<double> data(values.values().begin() + static_cast<std::ptrdiff_t>(begin * width),
                           values.values().begin() + static_cast<std::ptrdiff_t>((begin + count) * width));
  out.values = Tensor({count, width}, std::move(data));
  if (!timestamps.empty()) {
    out.timestamps.assign(timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                          timestamps.begin() + static_cast<std::ptrdiff_t>(begin + count));
  }
  return out;
}

Dataset parse_csv(const std::string& text, const std::string& name) {
  std::vector<std::string_view> lines;
  std::string_view rest(text);
  while (!rest.empty()) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    if (!trim(line).empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    rest.remove_prefix(nl + 1);
  }
  if (lines.empty()) throw LoadError(name + ": empty file");
  const auto header = split_cells(lines[0]);
  if (lines.size() < 2) throw LoadError(name + ": no data rows after the header");

  const auto first = split_cells(lines[1]);
  double probe = 0.0;
  const bool has_label = !first.empty() && !parse_double(first[0], probe);
  const std::size_t skip = has_label ? 1 : 0;
  if (header.size() <= skip) throw LoadError(name + ": no value columns");
  const std::size_t width = header.size() - skip;

  Dataset d;
  d.name = name;
  for (std::size_t c = skip; c < header.size(); ++c) d.columns.emplace_back(header[c]);
  std::vector<double> data;
  data.reserve((lines.size() - 1) * width);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_cells(lines[r]);
    if (cells.size() != header.size()) {
      throw FormatError(name + ": row " + std::to_string(r + 1) + " has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(header.size()));
    }
    if (has_label) d.timestamps.emplace_back(cells[0]);
    for (std::size_t c = skip; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw LoadError(name + ": cannot parse '" + std::string(cells[c]) + "' at row " +
                        std::to_string(r + 1) + ", column " + std::to_string(c + 1));
      }
      data.push_back(v);
    }
  }
  d.values = Tensor({lines.size() - 1, width}, std::move(data));
  return d;
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path);
}

void SplitSpec::validate() const {
  if (!(train > 0.0 && val > 0.0 && test > 0.0)) throw ConfigError("data.split: every ratio must be positive");
  if (std::abs(train + val + test - 1.0) > 1e-9) throw ConfigError("data.split: ratios must sum to 1");
}

Splits chronological_split(const Dataset& d, const SplitSpec& spec, std::size_t min_rows) {
  spec.validate();
  const std::size_t rows = d.rows();
  // The small offset keeps exact products such as 0.7 * 100 = 70.00000000000001
  // and 0.29 * 100 = 28.999999999999996 on the intended integer.
  auto part = [rows](double ratio) {
    return static_cast<std::size_t>(std::floor(ratio * static_cast<double>(rows) + 1e-9));
  };
  const std::size_t n_train = part(spec.train);
  const std::size_t n_val = part(spec.val);
  if (n_train + n_val >= rows) throw SplitError(d.name + ": split leaves no test rows");
  const std::size_t n_test = rows - n_train - n_val;
  for (auto [label, n] : {std::pair{"train", n_train}, {"val", n_val}, {"test", n_test}}) {
    if (n < min_rows || n == 0) {
      throw SplitError(d.name + ": " + label + " split has " + std::to_string(n) + " rows, needs " +
                       std::to_string(min_rows));
    }
  }
  return {d.slice(0, n_train, ":train"), d.slice(n_train, n_val, ":val"),
          d.slice(n_train + n_val, n_test, ":test")};
}

Normalized instance_normalize(const Tensor& window) {
  const std::size_t rows = window.rows(), cols = window.cols();
  if (rows < 2) throw DimensionError("instance_normalize: window needs at least 2 rows");
  Normalized out{Tensor(window.shape()), {std::vector<double>(cols, 0.0), std::vector<double>(cols, 0.0)}};
  for (std::size_t c = 0; c < cols; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < rows; ++r) mean += window.at(r, c);
    mean /= static_cast<double>(rows);
    double var = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double dlt = window.at(r, c) - mean;
      var += dlt * dlt;
    }
    out.stats.mean[c] = mean;
    out.stats.stddev[c] = std::sqrt(var / static_cast<double>(rows));
  }
  out.values = apply_normalization(window, out.stats);
  return out;
}

Tensor apply_normalization(const Tensor& values, const NormStats& stats) {
  if (values.cols() != stats.mean.size()) throw DimensionError("normalize: column count mismatch");
  Tensor out(values.shape());
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) {
      out.at(r, c) = (values.at(r, c) - stats.mean[c]) / (stats.stddev[c] + kNormEpsilon);
    }
  }
  return out;
}

Tensor denormalize(const Tensor& values, const NormStats& stats) {
  if (values.cols() != stats.mean.size()) throw DimensionError("denormalize: column count mismatch");
  Tensor out(values.shape());
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) {
      out.at(r, c) = values.at(r, c) * (stats.stddev[c] + kNormEpsilon) + stats.mean[c];
    }
  }
  return out;
}

std::size_t window_count(std::size_t rows, std::size_t input_len, std::size_t horizon, std::size_t stride) {
  if (stride == 0) throw ConfigError("window stride must be positive");
  if (rows < input_len + horizon) {
    throw SplitError("no windows: " + std::to_string(rows) + " rows < input_len + horizon = " +
                     std::to_string(input_len + horizon));
  }
  return (rows - input_len - horizon) / stride + 1;
}

std::vector<WindowPair> make_windows(const Dataset& split, std::size_t input_len, std::size_t horizon,
                                     std::size_t stride) {
  const std::size_t n = window_count(split.rows(), input_len, horizon, stride);
  const std::size_t width = split.variables();
  const auto& v = split.values.values();
  auto rows_of = [&](std::size_t begin, std::size_t count) {
    return Tensor({count, width}, std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(begin * width),
                                                      v.begin() + static_cast<std::ptrdiff_t>((begin + count) * width)));
  };
  std::vector<WindowPair> out;
  out.reserve(n);
  for (std::size_t w = 0; w < n; ++w) {
    const std::size_t o = w * stride;
    out.push_back({o, rows_of(o, input_len), rows_of(o + input_len, horizon)});
  }
  return out;
}

void MetricAccumulator::add(const Tensor& pred, const Tensor& truth) {
  if (pred.shape() != truth.shape()) {
    throw DimensionError("metrics: prediction " + shape_string(pred.shape()) + " vs truth " +
                         shape_string(truth.shape()));
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - truth[i];
    squared_ += d * d;
    absolute_ += std::abs(d);
  }
  count_ += pred.size();
}

Metrics MetricAccumulator::result() const {
  if (count_ == 0) return {};
  const double n = static_cast<double>(count_);
  return {squared_ / n, absolute_ / n};
}

Metrics naive_baseline(const Dataset& split, std::size_t input_len, std::size_t horizon) {
  MetricAccumulator acc;
  for (const auto& w : make_windows(split, input_len, horizon)) {
    Tensor pred(w.target.shape());
    const auto last = w.input.row(w.input.rows() - 1);
    for (std::size_t r = 0; r < pred.rows(); ++r) {
      for (std::size_t c = 0; c < pred.cols(); ++c) pred.at(r, c) = last[c];
    }
    acc.add(pred, w.target);
  }
  return acc.result();
}

}  // namespace mshyper
