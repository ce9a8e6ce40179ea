#include "mshyper/error.hpp"

#include <cmath>
#include <sstream>

namespace mshyper {

void require_finite(const double* data, std::size_t count, const std::string& where) {
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::isfinite(data[i])) {
      std::ostringstream oss;
      oss << where << ": non-finite value " << data[i] << " at flat index " << i;
      throw NumericError(oss.str());
    }
  }
}

}  // namespace mshyper
