#include "siqrng/extractor.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "siqrng/error.hpp"
#include "siqrng/gf2.hpp"
#include "siqrng/uncertainty.hpp"

namespace siqrng {

unsigned bits_per_sample(int m) {
  if (m < 2) throw EncodingError("need at least two bins");
  return static_cast<unsigned>(std::bit_width(static_cast<unsigned>(m - 1)));
}

BitVector samples_to_bits(std::span<const int> indices, unsigned bits_per_sample) {
  if (bits_per_sample == 0 || bits_per_sample > 31) throw EncodingError("unsupported sample width");
  const std::int64_t offset = std::int64_t{1} << (bits_per_sample - 1);
  const std::int64_t limit = std::int64_t{1} << bits_per_sample;
  BitVector out;
  for (int k : indices) {
    const std::int64_t v = k + offset;
    if (v < 0 || v >= limit) {
      throw EncodingError("bin index " + std::to_string(k) + " does not fit " + std::to_string(bits_per_sample) +
                          " bits");
    }
    out.append_bits(static_cast<std::uint64_t>(v), bits_per_sample);
  }
  return out;
}

ToeplitzSeed::ToeplitzSeed(BitVector bits, std::size_t l_max, std::size_t n_raw)
    : bits_(std::move(bits)), l_max_(l_max), n_raw_(n_raw) {
  if (n_raw == 0) throw DimensionError("Toeplitz input width must be positive");
  if (bits_.size() != required_bits(l_max, n_raw)) {
    throw DimensionError("Toeplitz seed has " + std::to_string(bits_.size()) + " bits, needs " +
                         std::to_string(required_bits(l_max, n_raw)));
  }
}

ToeplitzSeed ToeplitzSeed::random(std::size_t l_max, std::size_t n_raw, std::mt19937_64& rng) {
  const std::size_t n = required_bits(l_max, n_raw);
  std::vector<std::uint64_t> words((n + 63) / 64);
  for (auto& w : words) w = rng();
  return {BitVector(std::move(words), n), l_max, n_raw};
}

namespace {

void check_dims(const BitVector& block, const ToeplitzSeed& seed, std::size_t l) {
  if (l > seed.l_max()) throw DimensionError("requested output longer than the seed supports");
  if (block.size() != seed.n_raw()) throw DimensionError("input block length differs from the seed's n_raw");
}

}  // namespace

BitVector toeplitz_hash(const BitVector& block, const ToeplitzSeed& seed, std::size_t l) {
  check_dims(block, seed, l);
  if (l == 0) return {};
  // Coefficient t of seed(z) x(z) is sum_j seed[t - j] x_j; row i is t = i + n - 1.
  // Only seed bits [0, l + n - 1) matter.
  const std::size_t n = seed.n_raw();
  const BitVector s = seed.bits().slice(0, l + n - 1);
  const auto product = gf2::multiply(s.words(), block.words());
  const BitVector full(product, product.size() * 64);
  return full.slice(n - 1, l);
}

BitVector toeplitz_hash_naive(const BitVector& block, const ToeplitzSeed& seed, std::size_t l) {
  check_dims(block, seed, l);
  const std::size_t n = seed.n_raw();
  const std::size_t len = seed.bits().size();
  // Reverse the seed: T[i][j] = seed[i - j + n - 1] = rev[len - n - i + j], so
  // row i is the contiguous window rev[len - n - i, len - i).
  BitVector rev(len);
  for (std::size_t k = 0; k < len; ++k) rev.set(k, seed.bits().get(len - 1 - k));
  BitVector y(l);
  for (std::size_t i = 0; i < l; ++i) {
    const BitVector row = rev.slice(len - n - i, n);
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < row.words().size(); ++w) acc ^= row.words()[w] & block.words()[w];
    y.set(i, std::popcount(acc) & 1);
  }
  return y;
}

BitVector extract_block(std::span<const int> indices, int m, double h_low, double epsilon, const ToeplitzSeed& seed) {
  const BitVector raw = samples_to_bits(indices, bits_per_sample(m));
  if (indices.empty()) return {};
  const auto target = secure_length(indices.size(), h_low, epsilon);
  const auto l = std::min<std::uint64_t>(target, seed.l_max());
  return toeplitz_hash(raw, seed, static_cast<std::size_t>(l));
}

SeedSchedule::SeedSchedule(Mode mode, std::optional<ToeplitzSeed> seed, BitVector pool, std::size_t l_max,
                           std::size_t n_raw)
    : mode_(mode), current_(std::move(seed)), pool_(std::move(pool)), l_max_(l_max), n_raw_(n_raw) {}

SeedSchedule SeedSchedule::reuse(ToeplitzSeed seed) {
  const auto l = seed.l_max();
  const auto n = seed.n_raw();
  return {Mode::reuse, std::move(seed), {}, l, n};
}

SeedSchedule SeedSchedule::fresh(BitVector pool, std::size_t l_max, std::size_t n_raw) {
  return {Mode::fresh, std::nullopt, std::move(pool), l_max, n_raw};
}

const ToeplitzSeed& SeedSchedule::next() {
  ++served_;
  if (mode_ == Mode::reuse) return *current_;
  const std::size_t need = ToeplitzSeed::required_bits(l_max_, n_raw_);
  if (offset_ + need > pool_.size()) throw Error("seed pool exhausted after " + std::to_string(served_ - 1) + " blocks");
  current_.emplace(pool_.slice(offset_, need), l_max_, n_raw_);
  offset_ += need;
  return *current_;
}

}  // namespace siqrng
