#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace siqrng {

// Equally spaced points x_k = k * delta for integer k in [lo, hi].
// Used both for bin centers of a binning scheme and for the (possibly odd,
// symmetric) supports the extremal estimator works on.
class Lattice {
 public:
  Lattice(int lo, int hi, double delta);

  /// Points k*delta for k in [-half_width, half_width].
  static Lattice symmetric(int half_width, double delta);

  int lo() const { return lo_; }
  int hi() const { return hi_; }
  double delta() const { return delta_; }
  std::size_t size() const { return static_cast<std::size_t>(hi_ - lo_ + 1); }
  bool is_symmetric() const { return lo_ == -hi_; }

  double point(std::size_t i) const { return (lo_ + static_cast<int>(i)) * delta_; }
  int index_at(std::size_t i) const { return lo_ + static_cast<int>(i); }
  std::size_t slot(int k) const { return static_cast<std::size_t>(k - lo_); }

  bool operator==(const Lattice&) const = default;

 private:
  int lo_;
  int hi_;
  double delta_;
};

// Discretized quadrature measurement: m bins of width delta centered on k*delta
// for k in [-m/2, m/2-1]; interior bin k covers [(k-1/2)delta, (k+1/2)delta),
// the two edge bins extend to -inf and +inf.
class BinningScheme {
 public:
  BinningScheme(int m, double delta);

  int m() const { return m_; }
  double delta() const { return delta_; }
  int min_index() const { return -m_ / 2; }
  int max_index() const { return m_ / 2 - 1; }
  double center(int k) const { return k * delta_; }
  std::size_t slot(int k) const { return static_cast<std::size_t>(k + m_ / 2); }
  Lattice centers() const { return Lattice(min_index(), max_index(), delta_); }

  /// Bin index of an SNU value. Ties go up; NaN lands in the bottom edge bin
  /// so that it trips the extreme-bin abort.
  int bin(double x) const;

  bool operator==(const BinningScheme&) const = default;

 private:
  int m_;
  double delta_;
};

struct Histogram {
  explicit Histogram(BinningScheme scheme);

  BinningScheme scheme;
  std::vector<std::uint64_t> counts;  // indexed by scheme.slot(k)
  std::uint64_t n = 0;

  std::uint64_t count(int k) const { return counts[scheme.slot(k)]; }
  void add(double x);
  /// Component-wise sum; both histograms must share the scheme.
  Histogram& merge(const Histogram& other);
};

// Probability vector over a lattice; sums to 1 within 1e-12.
struct Pmf {
  Pmf(Lattice support, std::vector<double> probs);

  Lattice support;
  std::vector<double> probs;

  double mean() const;
  double second_moment() const;
  double variance() const;
};

/// x -> x / sqrt(shot_var - dark_var). Throws CalibrationError when shot_var <= dark_var.
std::vector<double> normalize_snu(std::span<const double> raw, double shot_var, double dark_var);

/// Removes the sample mean in place (off by default in the protocol).
void subtract_mean(std::span<double> samples);

int bin_sample(double x, const BinningScheme& scheme);

Histogram accumulate(std::span<const double> samples, const BinningScheme& scheme);

/// Gaussian of standard deviation sigma integrated over each bin; the edge bins
/// absorb the open tails.
Pmf discretized_gaussian_pmf(double sigma, const BinningScheme& scheme);

enum class ExtremeBins { ok, violated };

/// Violated iff either edge bin holds a count.
ExtremeBins extreme_bin_check(const Histogram& h);

/// CSV with header "k,center,count".
void write_histogram_csv(std::ostream& out, const Histogram& h);

}  // namespace siqrng
