#include "siqrng/uncertainty.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "siqrng/error.hpp"

namespace siqrng {

void BoundParams::validate() const {
  if (!(delta_q > 0.0) || !(delta_p > 0.0)) throw std::invalid_argument("bin widths must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
}

double incompatibility_constant(double delta_q, double delta_p, ConstantMode mode) {
  if (!(delta_q > 0.0) || !(delta_p > 0.0)) throw std::invalid_argument("bin widths must be positive");
  const double area = delta_q * delta_p;
  if (mode == ConstantMode::leading_order) {
    if (area > 0.1) throw PrecisionError("leading-order overlap constant needs dq*dp <= 0.1");
    return area / (4.0 * std::numbers::pi);
  }
  // (1/4pi) dq dp R^2 with R evaluated at dq dp / 8 is exactly the concentration
  // eigenvalue at that bandwidth.
  return prolate_concentration(area / 8.0);
}

double h_low(double h_max, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw std::domain_error("overlap constant must lie in (0, 1]");
  return -h_max - std::log2(c);
}

std::uint64_t secure_length(std::uint64_t n, double h_low_per_sample, double epsilon) {
  if (n == 0) throw std::invalid_argument("secure_length needs n >= 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1]");
  const double bits = static_cast<double>(n) * h_low_per_sample - 2.0 * std::log2(1.0 / epsilon);
  if (!(bits > 0.0)) return 0;
  return static_cast<std::uint64_t>(std::floor(bits));
}

}  // namespace siqrng
