#include "mshyper/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "mshyper/error.hpp"

namespace mshyper {

Dataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.steps == 0 || spec.variables == 0) throw ConfigError("synthetic: steps and variables must be positive");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Tensor values({spec.steps, spec.variables});
  for (std::size_t t = 0; t < spec.steps; ++t) {
    for (std::size_t v = 0; v < spec.variables; ++v) {
      double x = 0.0;
      for (double period : spec.periods) {
        x += std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period +
                      static_cast<double>(v) * std::numbers::pi / 3.0);
      }
      values.at(t, v) = x + spec.noise * noise(rng);
    }
  }
  Dataset d;
  d.name = "synthetic";
  d.values = std::move(values);
  d.frequency = "hourly";
  for (std::size_t v = 0; v < spec.variables; ++v) d.columns.push_back("x" + std::to_string(v));
  return d;
}

std::string to_csv(const Dataset& d) {
  std::ostringstream out;
  for (std::size_t c = 0; c < d.variables(); ++c) {
    out << (c ? "," : "") << (c < d.columns.size() ? d.columns[c] : "x" + std::to_string(c));
  }
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.variables(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", d.values.at(r, c));
      out << (c ? "," : "") << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mshyper
