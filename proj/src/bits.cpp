#include "siqrng/bits.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <fstream>
#include <iterator>
#include <ostream>

#include "siqrng/error.hpp"

namespace siqrng {

namespace {

std::size_t words_for(std::size_t nbits) { return (nbits + 63) / 64; }

}  // namespace

BitVector::BitVector(std::size_t nbits) : words_(words_for(nbits), 0), nbits_(nbits) {}

BitVector::BitVector(std::vector<std::uint64_t> words, std::size_t nbits) : words_(std::move(words)), nbits_(nbits) {
  if (words_.size() < words_for(nbits)) throw DimensionError("word buffer shorter than bit count");
  words_.resize(words_for(nbits));
  clear_tail();
}

void BitVector::clear_tail() {
  if (nbits_ % 64 != 0) words_.back() &= (std::uint64_t{1} << (nbits_ % 64)) - 1;
}

void BitVector::push_back(bool value) {
  if (nbits_ % 64 == 0) words_.push_back(0);
  ++nbits_;
  set(nbits_ - 1, value);
}

void BitVector::append_bits(std::uint64_t value, unsigned width) {
  for (unsigned b = width; b-- > 0;) push_back((value >> b) & 1U);
}

void BitVector::append(const BitVector& other) {
  const std::size_t base = nbits_;
  resize(nbits_ + other.nbits_);
  if (base % 64 == 0) {
    std::copy(other.words_.begin(), other.words_.end(), words_.begin() + static_cast<std::ptrdiff_t>(base / 64));
    return;
  }
  const unsigned shift = base % 64;
  std::size_t w = base / 64;
  for (std::uint64_t word : other.words_) {
    words_[w] |= word << shift;
    if (w + 1 < words_.size()) words_[w + 1] |= word >> (64 - shift);
    ++w;
  }
  clear_tail();
}

void BitVector::resize(std::size_t nbits) {
  words_.resize(words_for(nbits), 0);
  nbits_ = nbits;
  clear_tail();
}

BitVector BitVector::slice(std::size_t start, std::size_t length) const {
  if (start + length > nbits_ || start + length < start) throw DimensionError("slice out of range");
  BitVector out(length);
  const unsigned shift = start % 64;
  const std::size_t first = start / 64;
  for (std::size_t w = 0; w < out.words_.size(); ++w) {
    std::uint64_t lo = words_[first + w] >> shift;
    if (shift != 0 && first + w + 1 < words_.size()) lo |= words_[first + w + 1] << (64 - shift);
    out.words_[w] = lo;
  }
  out.clear_tail();
  return out;
}

std::uint64_t BitVector::read_bits(std::size_t start, unsigned width) const {
  if (width > 64 || start + width > nbits_) throw DimensionError("read past end of bit vector");
  std::uint64_t v = 0;
  for (unsigned b = 0; b < width; ++b) v = (v << 1) | static_cast<std::uint64_t>(get(start + b));
  return v;
}

std::size_t BitVector::count_ones() const {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

BitVector& BitVector::operator^=(const BitVector& other) {
  if (other.nbits_ != nbits_) throw DimensionError("xor of bit vectors with different lengths");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

std::vector<std::uint8_t> BitVector::to_bytes() const {
  std::vector<std::uint8_t> out((nbits_ + 7) / 8, 0);
  for (std::size_t i = 0; i < nbits_; ++i) {
    if (get(i)) out[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
  }
  return out;
}

BitVector BitVector::from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits) {
  if (nbits > bytes.size() * 8) throw DimensionError("byte buffer shorter than bit count");
  BitVector out(nbits);
  for (std::size_t i = 0; i < nbits; ++i) out.set(i, (bytes[i / 8] >> (7 - i % 8)) & 1U);
  return out;
}

std::string BitVector::to_ascii() const {
  std::string s(nbits_, '0');
  for (std::size_t i = 0; i < nbits_; ++i) {
    if (get(i)) s[i] = '1';
  }
  return s;
}

BitVector BitVector::from_ascii(std::string_view text) {
  BitVector out;
  for (char ch : text) {
    if (ch == '0' || ch == '1') {
      out.push_back(ch == '1');
    } else if (!std::isspace(static_cast<unsigned char>(ch))) {
      throw EncodingError("bit text contains a character other than 0/1");
    }
  }
  return out;
}

void write_packed(std::ostream& out, const BitVector& bits) {
  const auto bytes = bits.to_bytes();
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_ascii(std::ostream& out, const BitVector& bits, std::size_t line_width) {
  const std::string s = bits.to_ascii();
  if (line_width == 0) {
    out << s << '\n';
    return;
  }
  for (std::size_t i = 0; i < s.size(); i += line_width) out << std::string_view(s).substr(i, line_width) << '\n';
}

namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

BitVector read_bit_file(const std::filesystem::path& path) {
  const auto raw = slurp(path);
  const bool ascii = !raw.empty() && std::all_of(raw.begin(), raw.end(), [](std::uint8_t c) {
    return c == '0' || c == '1' || std::isspace(c);
  });
  if (ascii) return BitVector::from_ascii(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
  return BitVector::from_bytes(raw);
}

void write_seed_file(const std::filesystem::path& path, const BitVector& bits) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  std::uint8_t header[8];
  std::uint64_t n = bits.size();
  for (auto& b : header) {
    b = static_cast<std::uint8_t>(n & 0xFF);
    n >>= 8;
  }
  out.write(reinterpret_cast<const char*>(header), 8);
  write_packed(out, bits);
}

BitVector read_seed_file(const std::filesystem::path& path) {
  const auto raw = slurp(path);
  if (raw.size() < 8) throw EncodingError("seed file shorter than its header");
  std::uint64_t n = 0;
  for (int i = 7; i >= 0; --i) n = (n << 8) | raw[static_cast<std::size_t>(i)];
  const std::span<const std::uint8_t> body(raw.data() + 8, raw.size() - 8);
  if (n > body.size() * 8) throw EncodingError("seed file truncated");
  return BitVector::from_bytes(body, n);
}

}  // namespace siqrng
