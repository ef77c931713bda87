#include "siqrng/gf2.hpp"

#include <algorithm>
#include <atomic>

#if defined(__x86_64__) || defined(__i386__)
#include <cpuid.h>
#include <immintrin.h>
#define SIQRNG_X86 1
#endif

namespace siqrng::gf2 {

namespace {

#ifdef SIQRNG_X86
__attribute__((target("pclmul,sse2"))) Product128 clmul_hw(std::uint64_t a, std::uint64_t b) {
  const __m128i va = _mm_set_epi64x(0, static_cast<long long>(a));
  const __m128i vb = _mm_set_epi64x(0, static_cast<long long>(b));
  const __m128i r = _mm_clmulepi64_si128(va, vb, 0x00);
  return {static_cast<std::uint64_t>(_mm_cvtsi128_si64(r)),
          static_cast<std::uint64_t>(_mm_cvtsi128_si64(_mm_unpackhi_epi64(r, r)))};
}

bool cpu_has_pclmul() {
  unsigned eax = 0, ebx = 0, ecx = 0, edx = 0;
  if (__get_cpuid(1, &eax, &ebx, &ecx, &edx) == 0) return false;
  return (ecx & bit_PCLMUL) != 0;
}
#else
bool cpu_has_pclmul() { return false; }
#endif

std::atomic<bool> g_enabled{true};

bool use_hw() {
  static const bool available = cpu_has_pclmul();
  return available && g_enabled.load(std::memory_order_relaxed);
}

// Schoolbook word product accumulated into out (size a+b).
template <class Mul>
void schoolbook(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b, std::uint64_t* out, Mul mul) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::uint64_t ai = a[i];
    if (ai == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const Product128 p = mul(ai, b[j]);
      out[i + j] ^= p.lo;
      out[i + j + 1] ^= p.hi;
    }
  }
}

constexpr std::size_t kKaratsubaCutoff = 32;

// Karatsuba on equal-length operands of n words; out has 2n words and is
// overwritten. scratch must hold at least 4n words.
template <class Mul>
void karatsuba(const std::uint64_t* a, const std::uint64_t* b, std::size_t n, std::uint64_t* out,
               std::uint64_t* scratch, Mul mul) {
  if (n <= kKaratsubaCutoff) {
    std::fill(out, out + 2 * n, 0);
    schoolbook({a, n}, {b, n}, out, mul);
    return;
  }
  const std::size_t lo = n / 2;
  const std::size_t hi = n - lo;
  // a = a0 + z^lo a1, sizes lo and hi (hi >= lo).
  std::uint64_t* sa = scratch;           // hi words: a0 + a1
  std::uint64_t* sb = scratch + hi;      // hi words: b0 + b1
  std::uint64_t* mid = scratch + 2 * hi; // 2*hi words
  std::uint64_t* rest = mid + 2 * hi;

  for (std::size_t i = 0; i < hi; ++i) {
    sa[i] = a[lo + i] ^ (i < lo ? a[i] : 0);
    sb[i] = b[lo + i] ^ (i < lo ? b[i] : 0);
  }
  karatsuba(a, b, lo, out, rest, mul);                      // out[0, 2lo)   = a0 b0
  karatsuba(a + lo, b + lo, hi, out + 2 * lo, rest, mul);   // out[2lo, 2n)  = a1 b1
  karatsuba(sa, sb, hi, mid, rest, mul);                    // mid = (a0+a1)(b0+b1)
  for (std::size_t i = 0; i < 2 * lo; ++i) mid[i] ^= out[i];
  for (std::size_t i = 0; i < 2 * hi; ++i) mid[i] ^= out[2 * lo + i];
  for (std::size_t i = 0; i < 2 * hi; ++i) out[lo + i] ^= mid[i];
}

template <class Mul>
std::vector<std::uint64_t> multiply_with(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                         Mul mul) {
  std::vector<std::uint64_t> out(a.size() + b.size(), 0);
  if (a.empty() || b.empty()) return out;
  if (a.size() < b.size()) std::swap(a, b);
  // Chop the longer operand into chunks the size of the shorter one.
  const std::size_t n = b.size();
  if (n <= kKaratsubaCutoff) {
    schoolbook(a, b, out.data(), mul);
    return out;
  }
  std::vector<std::uint64_t> chunk(n, 0);
  std::vector<std::uint64_t> prod(2 * n);
  std::vector<std::uint64_t> scratch(8 * n + 64);
  for (std::size_t off = 0; off < a.size(); off += n) {
    const std::size_t len = std::min(n, a.size() - off);
    std::fill(chunk.begin(), chunk.end(), 0);
    std::copy_n(a.begin() + static_cast<std::ptrdiff_t>(off), len, chunk.begin());
    karatsuba(chunk.data(), b.data(), n, prod.data(), scratch.data(), mul);
    const std::size_t take = std::min(2 * n, out.size() - off);
    for (std::size_t i = 0; i < take; ++i) out[off + i] ^= prod[i];
  }
  return out;
}

}  // namespace

Product128 clmul_portable(std::uint64_t a, std::uint64_t b) {
  // 4-bit windows of b against a precomputed table of a * w (w < 16), each
  // entry held as 128 bits.
  Product128 table[16];
  table[0] = {0, 0};
  table[1] = {a, 0};
  for (int w = 2; w < 16; w += 2) {
    const Product128 half = table[w / 2];
    table[w] = {half.lo << 1, (half.hi << 1) | (half.lo >> 63)};
    table[w + 1] = {table[w].lo ^ a, table[w].hi};
  }
  Product128 r{0, 0};
  for (int shift = 60; shift >= 0; shift -= 4) {
    r.hi = (r.hi << 4) | (r.lo >> 60);
    r.lo <<= 4;
    const Product128 t = table[(b >> shift) & 0xF];
    r.lo ^= t.lo;
    r.hi ^= t.hi;
  }
  return r;
}

Product128 clmul(std::uint64_t a, std::uint64_t b) {
#ifdef SIQRNG_X86
  if (use_hw()) return clmul_hw(a, b);
#endif
  return clmul_portable(a, b);
}

bool hardware_clmul() { return use_hw(); }

void set_hardware_clmul_enabled(bool enabled) { g_enabled.store(enabled, std::memory_order_relaxed); }

std::vector<std::uint64_t> multiply(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
#ifdef SIQRNG_X86
  if (use_hw()) return multiply_with(a, b, clmul_hw);
#endif
  return multiply_with(a, b, clmul_portable);
}

}  // namespace siqrng::gf2
