#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mshyper/dataset.hpp"

namespace mshyper {

// Sum of unit-amplitude sinusoids plus Gaussian noise. Variable v shifts the
// phase of every component by v * pi / 3.
struct SyntheticSpec {
  std::size_t steps = 2000;
  std::size_t variables = 1;
  std::vector<double> periods{24.0, 168.0};
  double noise = 0.05;  // noise standard deviation relative to unit amplitude
  std::uint64_t seed = 7;
};

Dataset make_synthetic(const SyntheticSpec& spec);

// Header "x0,x1,..." followed by one row per step, printed with %.17g.
std::string to_csv(const Dataset& d);

}  // namespace mshyper
