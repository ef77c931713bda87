#include "siqrng/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "siqrng/error.hpp"

namespace siqrng {

Lattice::Lattice(int lo, int hi, double delta) : lo_(lo), hi_(hi), delta_(delta) {
  if (hi < lo) throw std::invalid_argument("lattice needs hi >= lo");
  if (!(delta > 0.0)) throw std::invalid_argument("lattice spacing must be positive");
}

Lattice Lattice::symmetric(int half_width, double delta) {
  if (half_width < 0) throw std::invalid_argument("half width must be >= 0");
  return Lattice(-half_width, half_width, delta);
}

BinningScheme::BinningScheme(int m, double delta) : m_(m), delta_(delta) {
  if (m < 2 || m % 2 != 0) throw std::invalid_argument("bin count m must be even and >= 2");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("bin width must be positive and finite");
  }
}

int BinningScheme::bin(double x) const {
  const double lo = min_index();
  const double hi = max_index();
  if (std::isnan(x)) return min_index();
  const double k = std::floor(x / delta_ + 0.5);
  return static_cast<int>(std::clamp(k, lo, hi));
}

Histogram::Histogram(BinningScheme s) : scheme(s), counts(static_cast<std::size_t>(s.m()), 0) {}

void Histogram::add(double x) {
  ++counts[scheme.slot(scheme.bin(x))];
  ++n;
}

Histogram& Histogram::merge(const Histogram& other) {
  if (!(other.scheme == scheme)) throw DimensionError("cannot merge histograms over different schemes");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  n += other.n;
  return *this;
}

Pmf::Pmf(Lattice s, std::vector<double> p) : support(s), probs(std::move(p)) {
  if (probs.size() != support.size()) throw DimensionError("pmf length does not match its support");
  double total = 0.0;
  for (double v : probs) {
    if (!(v >= 0.0)) throw std::invalid_argument("pmf entries must be non-negative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("pmf does not sum to 1");
}

double Pmf::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) s += probs[i] * support.point(i);
  return s;
}

double Pmf::second_moment() const {
  double s = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double x = support.point(i);
    s += probs[i] * x * x;
  }
  return s;
}

double Pmf::variance() const {
  const double mu = mean();
  return second_moment() - mu * mu;
}

std::vector<double> normalize_snu(std::span<const double> raw, double shot_var, double dark_var) {
  if (!(shot_var > dark_var)) {
    throw CalibrationError("shot-noise variance does not exceed dark-noise variance");
  }
  const double scale = 1.0 / std::sqrt(shot_var - dark_var);
  std::vector<double> out(raw.size());
  std::transform(raw.begin(), raw.end(), out.begin(), [scale](double x) { return x * scale; });
  return out;
}

void subtract_mean(std::span<double> samples) {
  if (samples.empty()) return;
  const double mu = std::accumulate(samples.begin(), samples.end(), 0.0) / samples.size();
  for (auto& x : samples) x -= mu;
}

int bin_sample(double x, const BinningScheme& scheme) { return scheme.bin(x); }

Histogram accumulate(std::span<const double> samples, const BinningScheme& scheme) {
  Histogram h(scheme);
  for (double x : samples) h.add(x);
  return h;
}

Pmf discretized_gaussian_pmf(double sigma, const BinningScheme& scheme) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  const double inv = 1.0 / (std::sqrt(2.0) * sigma);
  const double d = scheme.delta();

  // Mass of [a, b) under N(0, sigma^2), evaluated on the tail side that keeps
  // precision: erfc for bins away from zero, erf for the bin straddling it.
  auto mass = [inv](double a, double b) {
    if (a >= 0.0) return 0.5 * (std::erfc(a * inv) - std::erfc(b * inv));
    if (b <= 0.0) return 0.5 * (std::erfc(-b * inv) - std::erfc(-a * inv));
    return 0.5 * (std::erf(b * inv) - std::erf(a * inv));
  };

  const int lo = scheme.min_index();
  const int hi = scheme.max_index();
  std::vector<double> p(static_cast<std::size_t>(scheme.m()));
  p.front() = 0.5 * std::erfc(-((lo + 0.5) * d) * inv);
  p.back() = 0.5 * std::erfc(((hi - 0.5) * d) * inv);
  for (int k = lo + 1; k < hi; ++k) p[scheme.slot(k)] = mass((k - 0.5) * d, (k + 0.5) * d);

  // Rounding residue is ~1e-16 per bin; fold it into the largest bin.
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  *std::max_element(p.begin(), p.end()) += 1.0 - total;
  return Pmf(scheme.centers(), std::move(p));
}

ExtremeBins extreme_bin_check(const Histogram& h) {
  return (h.counts.front() > 0 || h.counts.back() > 0) ? ExtremeBins::violated : ExtremeBins::ok;
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "k,center,count\n";
  for (int k = h.scheme.min_index(); k <= h.scheme.max_index(); ++k) {
    out << k << ',' << h.scheme.center(k) << ',' << h.count(k) << '\n';
  }
}

}  // namespace siqrng
