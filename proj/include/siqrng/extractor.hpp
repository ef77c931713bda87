#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>

#include "siqrng/bits.hpp"

namespace siqrng {

/// Fixed-width packing of bin indices: k -> k + 2^(b-1), b bits per sample,
/// most significant bit first. Throws EncodingError if an index does not fit.
BitVector samples_to_bits(std::span<const int> indices, unsigned bits_per_sample);

/// Bits per sample for an m-bin scheme: ceil(log2 m).
unsigned bits_per_sample(int m);

// Toeplitz matrix T (l_max x n_raw) with T[i][j] = bits[i - j + n_raw - 1].
class ToeplitzSeed {
 public:
  ToeplitzSeed(BitVector bits, std::size_t l_max, std::size_t n_raw);

  static ToeplitzSeed random(std::size_t l_max, std::size_t n_raw, std::mt19937_64& rng);
  static std::size_t required_bits(std::size_t l_max, std::size_t n_raw) { return l_max + n_raw - 1; }

  const BitVector& bits() const { return bits_; }
  std::size_t l_max() const { return l_max_; }
  std::size_t n_raw() const { return n_raw_; }

 private:
  BitVector bits_;
  std::size_t l_max_;
  std::size_t n_raw_;
};

/// y = T x over GF(2), first l rows. Computed as the middle coefficients of
/// the polynomial product seed(z) * x(z). Throws DimensionError on l > l_max or
/// a block whose length is not n_raw.
BitVector toeplitz_hash(const BitVector& block, const ToeplitzSeed& seed, std::size_t l);

/// Row-by-row reference: each output bit is the parity of a seed window ANDed
/// with the input. Quadratic; for testing.
BitVector toeplitz_hash_naive(const BitVector& block, const ToeplitzSeed& seed, std::size_t l);

/// Hash bin indices down to secure_length(n, h_low, epsilon) bits, capped at
/// the seed's l_max. Empty when the bound is not positive.
BitVector extract_block(std::span<const int> indices, int m, double h_low, double epsilon, const ToeplitzSeed& seed);

// Supplies a seed for each data block: either the same matrix for the whole
// session (what a fixed deployment does; flagged as a security warning) or a
// fresh matrix per block cut from an externally supplied seed pool.
class SeedSchedule {
 public:
  enum class Mode { reuse, fresh };

  static SeedSchedule reuse(ToeplitzSeed seed);
  static SeedSchedule fresh(BitVector pool, std::size_t l_max, std::size_t n_raw);

  Mode mode() const { return mode_; }
  /// Throws Error when a fresh pool runs dry.
  const ToeplitzSeed& next();
  std::size_t blocks_served() const { return served_; }

 private:
  SeedSchedule(Mode mode, std::optional<ToeplitzSeed> seed, BitVector pool, std::size_t l_max, std::size_t n_raw);

  Mode mode_;
  std::optional<ToeplitzSeed> current_;
  BitVector pool_;
  std::size_t offset_ = 0;
  std::size_t l_max_;
  std::size_t n_raw_;
  std::size_t served_ = 0;
};

}  // namespace siqrng
