#pragma once

#include <cstdint>

namespace siqrng {

enum class ConstantMode { leading_order, precise };

struct BoundParams {
  double delta_q = 0.0155607;
  double delta_p = 0.0155607;
  double epsilon = 1e-10;

  void validate() const;
};

/// Largest eigenvalue of the time/band-limiting operator on [-1, 1] with
/// bandwidth parameter `bandwidth`, i.e. (2c/pi) * R_00(c, 1)^2 where R_00 is
/// the zeroth radial prolate spheroidal function of the first kind.
/// Evaluated from the even Legendre expansion of the zeroth prolate function.
double prolate_concentration(double bandwidth);

/// R_00(c, 1), the radial prolate function at xi = 1.
double prolate_radial_at_one(double bandwidth);

/// Overlap constant c(dq, dp) = dq*dp/(4 pi) * R_00(dq*dp/8, 1)^2.
/// leading_order drops the prolate factor (an upper bound, since R_00 <= 1 for
/// small arguments) and refuses dq*dp > 0.1 with PrecisionError.
double incompatibility_constant(double delta_q, double delta_p,
                                ConstantMode mode = ConstantMode::precise);

/// -h_max - log2(c). Can go negative; callers clamp.
double h_low(double h_max, double c);

/// floor(n*h_low - 2 log2(1/epsilon)), clamped at 0. This is the n-sample
/// leftover-hash form of the single-shot secure length.
std::uint64_t secure_length(std::uint64_t n, double h_low_per_sample, double epsilon);

}  // namespace siqrng
