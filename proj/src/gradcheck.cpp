#include "mshyper/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "mshyper/error.hpp"

namespace mshyper {
namespace {

double evaluate(const LossBuilder& loss) {
  Tape tape;
  Var out = loss(tape);
  if (out.value().size() != 1) throw DimensionError("grad_check: loss must be a single value");
  return out.value()[0];
}

}  // namespace

GradCheckReport grad_check(const LossBuilder& loss, std::span<ParamTensor* const> params,
                           const GradCheckOptions& options) {
  if (!(options.step >= 1e-7 && options.step <= 1e-3)) {
    throw NumericError("grad_check: step must lie in [1e-7, 1e-3]");
  }
  for (ParamTensor* p : params) p->zero_grad();
  double base = 0.0;
  {
    Tape tape;
    Var out = loss(tape);
    base = out.value()[0];
    tape.backward(out);
  }
  const double again = evaluate(loss);
  if (again != base) {
    std::ostringstream oss;
    oss.precision(17);
    oss << "grad_check: loss is not deterministic (" << base << " vs " << again << ")";
    throw DeterminismError(oss.str());
  }

  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    for (std::size_t i = 0; i < params[pi]->size(); ++i) coords.emplace_back(pi, i);
  }
  if (coords.size() > options.max_coordinates) {
    std::mt19937_64 rng(options.seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(options.max_coordinates);
    std::sort(coords.begin(), coords.end());
  }

  GradCheckReport report;
  for (auto [pi, i] : coords) {
    ParamTensor& p = *params[pi];
    const double saved = p.value[i];
    p.value[i] = saved + options.step;
    const double plus = evaluate(loss);
    p.value[i] = saved - options.step;
    const double minus = evaluate(loss);
    p.value[i] = saved;
    const double numeric = (plus - minus) / (2.0 * options.step);
    const double err = std::abs(p.grad[i] - numeric) / std::max(1.0, std::abs(numeric));
    report.max_rel_error = std::max(report.max_rel_error, err);
    ++report.coordinates;
  }
  return report;
}

}  // namespace mshyper
