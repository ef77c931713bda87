#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

#include "oracles/oracles.hpp"
#include "siqrng/bits.hpp"
#include "siqrng/error.hpp"
#include "siqrng/gf2.hpp"

using namespace siqrng;

namespace {

BitVector random_bits(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint64_t> w((n + 63) / 64);
  for (auto& x : w) x = rng();
  return BitVector(std::move(w), n);
}

std::vector<std::uint8_t> unpack(const BitVector& b) {
  std::vector<std::uint8_t> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = b.get(i);
  return out;
}

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / (std::string("siqrng_test_") + name);
}

}  // namespace

TEST_CASE("bit vector basics") {
  BitVector b;
  CHECK(b.empty());
  b.push_back(true);
  b.push_back(false);
  b.append_bits(0b101, 3);
  CHECK(b.size() == 5);
  CHECK(b.to_ascii() == "10101");
  CHECK(b.read_bits(2, 3) == 0b101);
  CHECK(b.read_bits(0, 2) == 0b10);
  CHECK(b.count_ones() == 3);

  BitVector c = BitVector::from_ascii("01\n1 0");
  CHECK(c.to_ascii() == "0110");
  CHECK_THROWS_AS(BitVector::from_ascii("012"), EncodingError);

  b.append(c);
  CHECK(b.to_ascii() == "101010110");
  CHECK(b.slice(3, 4).to_ascii() == "0101");
  b.resize(3);
  CHECK(b.to_ascii() == "101");
  b.resize(70);
  CHECK(b.count_ones() == 2);

  BitVector x = BitVector::from_ascii("1100");
  x ^= BitVector::from_ascii("1010");
  CHECK(x.to_ascii() == "0110");
  CHECK_THROWS(x ^= BitVector::from_ascii("1"));
}

TEST_CASE("tail bits stay zero") {
  std::vector<std::uint64_t> w{~std::uint64_t{0}, ~std::uint64_t{0}};
  const BitVector b(w, 70);
  CHECK(b.count_ones() == 70);
  CHECK(b.words()[1] == 0x3F);
  CHECK(b == BitVector::from_ascii(std::string(70, '1')));
}

TEST_CASE("slices across word boundaries") {
  std::mt19937_64 rng(7);
  const BitVector b = random_bits(1000, rng);
  for (std::size_t start : {0u, 1u, 63u, 64u, 65u, 500u}) {
    for (std::size_t len : {0u, 1u, 64u, 100u, 300u}) {
      const BitVector s = b.slice(start, len);
      REQUIRE(s.size() == len);
      for (std::size_t i = 0; i < len; ++i) CHECK(s.get(i) == b.get(start + i));
    }
  }
  CHECK_THROWS(b.slice(900, 200));
}

TEST_CASE("byte packing is MSB first") {
  const BitVector b = BitVector::from_ascii("10000000 01");
  const auto bytes = b.to_bytes();
  REQUIRE(bytes.size() == 2);
  CHECK(bytes[0] == 0x80);
  CHECK(bytes[1] == 0x40);
  CHECK(BitVector::from_bytes(bytes, 10) == b);
  std::ostringstream os;
  write_packed(os, b);
  CHECK(os.str() == std::string("\x80\x40", 2));
  std::ostringstream as;
  write_ascii(as, b, 4);
  CHECK(as.str() == "1000\n0000\n01\n");
}

TEST_CASE("bit files round-trip") {
  std::mt19937_64 rng(9);
  const BitVector b = random_bits(1003, rng);

  const auto seed_path = temp_file("seed.bin");
  write_seed_file(seed_path, b);
  CHECK(std::filesystem::file_size(seed_path) == 8 + 126);
  CHECK(read_seed_file(seed_path) == b);

  const auto packed = temp_file("packed.bin");
  {
    std::ofstream out(packed, std::ios::binary);
    write_packed(out, b);
  }
  const BitVector back = read_bit_file(packed);
  CHECK(back.size() == 1008);
  CHECK(back.slice(0, 1003) == b);

  const auto ascii = temp_file("ascii.txt");
  {
    std::ofstream out(ascii);
    write_ascii(out, b, 80);
  }
  CHECK(read_bit_file(ascii) == b);

  {
    std::ofstream out(seed_path, std::ios::binary);
    out << "abc";
  }
  CHECK_THROWS(read_seed_file(seed_path));
  CHECK_THROWS(read_bit_file(temp_file("does_not_exist")));
  std::filesystem::remove(seed_path);
  std::filesystem::remove(packed);
  std::filesystem::remove(ascii);
}

TEST_CASE("carry-less multiply") {
  CHECK(gf2::clmul_portable(0b11, 0b11).lo == 0b101);
  const auto top = gf2::clmul_portable(std::uint64_t{1} << 63, std::uint64_t{1} << 63);
  CHECK(top.lo == 0);
  CHECK(top.hi == std::uint64_t{1} << 62);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10000; ++t) {
    const auto a = rng(), b = rng();
    const auto h = gf2::clmul(a, b);
    const auto p = gf2::clmul_portable(a, b);
    CHECK(h.lo == p.lo);
    CHECK(h.hi == p.hi);
  }
}

TEST_CASE("polynomial multiply against the bitwise oracle") {
  std::mt19937_64 rng(2);
  for (bool hw : {true, false}) {
    gf2::set_hardware_clmul_enabled(hw);
    for (std::size_t na : {1u, 3u, 31u, 32u, 33u, 70u, 129u}) {
      for (std::size_t nb : {1u, 2u, 40u, 64u, 257u}) {
        const BitVector a = random_bits(na * 64 - rng() % 64, rng);
        const BitVector b = random_bits(nb * 64 - rng() % 64, rng);
        const auto prod = gf2::multiply(a.words(), b.words());
        REQUIRE(prod.size() == a.words().size() + b.words().size());
        const auto ref = oracle::poly_multiply_bitwise(unpack(a), unpack(b));
        const BitVector got(prod, prod.size() * 64);
        bool same = true;
        for (std::size_t i = 0; i < got.size(); ++i) {
          const std::uint8_t want = i < ref.size() ? ref[i] : 0;
          if (got.get(i) != static_cast<bool>(want)) same = false;
        }
        CAPTURE(na);
        CAPTURE(nb);
        CHECK(same);
      }
    }
  }
  gf2::set_hardware_clmul_enabled(true);
  CHECK(gf2::multiply({}, std::vector<std::uint64_t>{1}).size() == 1);
}
