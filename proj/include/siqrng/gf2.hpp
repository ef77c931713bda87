#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace siqrng::gf2 {

struct Product128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

/// Carry-less 64x64 -> 128 product.
Product128 clmul(std::uint64_t a, std::uint64_t b);
Product128 clmul_portable(std::uint64_t a, std::uint64_t b);

/// True when the CPU has PCLMULQDQ and the hardware path is enabled.
bool hardware_clmul();
/// Forces the portable path (for testing and for exotic hosts).
void set_hardware_clmul_enabled(bool enabled);

/// Product of two GF(2) polynomials stored LSB-first in 64-bit words.
/// Result has a.size() + b.size() words.
std::vector<std::uint64_t> multiply(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

}  // namespace siqrng::gf2
