#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace siqrng {

// Packed bit string. Bit i lives in word i/64 at position i%64 (LSB first), so
// a bit vector doubles as a GF(2) polynomial with bit i the coefficient of z^i.
// Bits past size() in the last word are always zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t nbits);
  BitVector(std::vector<std::uint64_t> words, std::size_t nbits);

  std::size_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }

  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  void push_back(bool value);
  /// Appends the low `width` bits of `value`, most significant first.
  void append_bits(std::uint64_t value, unsigned width);
  void append(const BitVector& other);
  void resize(std::size_t nbits);

  /// Bits [start, start + length) as a new vector.
  BitVector slice(std::size_t start, std::size_t length) const;
  /// Reads `width <= 64` bits starting at `start` as an unsigned integer,
  /// first bit most significant.
  std::uint64_t read_bits(std::size_t start, unsigned width) const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  std::size_t count_ones() const;
  BitVector& operator^=(const BitVector& other);
  bool operator==(const BitVector& other) const = default;

  /// Packed bytes, most significant bit first within each byte; the last byte
  /// is zero padded.
  std::vector<std::uint8_t> to_bytes() const;
  static BitVector from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits);
  static BitVector from_bytes(std::span<const std::uint8_t> bytes) { return from_bytes(bytes, bytes.size() * 8); }

  std::string to_ascii() const;
  /// Accepts '0'/'1', skipping whitespace; anything else throws EncodingError.
  static BitVector from_ascii(std::string_view text);

 private:
  void clear_tail();

  std::vector<std::uint64_t> words_;
  std::size_t nbits_ = 0;
};

/// Raw packed output (MSB first within each byte), no header.
void write_packed(std::ostream& out, const BitVector& bits);
/// ASCII '0'/'1' export, one line per `line_width` bits (0 = one line).
void write_ascii(std::ostream& out, const BitVector& bits, std::size_t line_width = 0);

/// Reads a bit file: ASCII if the content is only '0'/'1'/whitespace,
/// otherwise packed bytes.
BitVector read_bit_file(const std::filesystem::path& path);

// Seed files: 8-byte little-endian bit count, then packed bytes.
void write_seed_file(const std::filesystem::path& path, const BitVector& bits);
BitVector read_seed_file(const std::filesystem::path& path);

}  // namespace siqrng
