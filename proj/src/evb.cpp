#include "siqrng/evb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "siqrng/error.hpp"
#include "siqrng/uncertainty.hpp"

namespace siqrng {

namespace {

constexpr int kMaxIterations = 200;

struct Moments {
  double f = 0.0;      // sum a / (1 + g a)^2
  double slope = 0.0;  // sum -2 a^2 / (1 + g a)^3
};

// Terms for k and -k coincide on a symmetric support; walk the non-negative
// half and double up.
template <class Fn>
void for_each_shift(const Lattice& support, double variance, Fn&& fn) {
  const double d = support.delta();
  if (support.is_symmetric()) {
    fn(-variance, 1.0);
    for (int k = 1; k <= support.hi(); ++k) {
      const double x = k * d;
      fn(x * x - variance, 2.0);
    }
    return;
  }
  for (int k = support.lo(); k <= support.hi(); ++k) {
    const double x = k * d;
    fn(x * x - variance, 1.0);
  }
}

Moments evaluate(const Lattice& support, double variance, double gamma) {
  Moments m;
  for_each_shift(support, variance, [&](double a, double w) {
    const double inv = 1.0 / (1.0 + gamma * a);
    const double inv2 = inv * inv;
    m.f += w * a * inv2;
    m.slope -= w * 2.0 * a * a * inv2 * inv;
  });
  return m;
}

}  // namespace

Lattice evb_support(const BinningScheme& scheme) { return Lattice::symmetric(scheme.m() / 2, scheme.delta()); }

double evb_gamma(const Lattice& support, double variance) {
  if (!(variance > 0.0)) throw EstimatorError("EVB needs a positive variance");
  double a_min = std::numeric_limits<double>::infinity();
  double a_max = -a_min;
  for_each_shift(support, variance, [&](double a, double) {
    a_min = std::min(a_min, a);
    a_max = std::max(a_max, a);
  });
  if (!(a_min < 0.0 && a_max > 0.0)) {
    throw EstimatorError("variance not achievable on this support");
  }
  // Admissible interval: every 1 + gamma a_k > 0.
  const double g_lo = -1.0 / a_max;
  const double g_hi = -1.0 / a_min;

  const double f0 = evaluate(support, variance, 0.0).f;
  if (f0 == 0.0) return 0.0;

  // f falls from +inf at g_lo to -inf at g_hi; close the bracket on the side of
  // zero where the sign change sits by creeping toward that pole.
  double lo = 0.0;
  double hi = 0.0;
  const double pole = f0 > 0.0 ? g_hi : g_lo;
  bool closed = false;
  for (int k = 1; k <= 60; ++k) {
    const double g = pole * (1.0 - std::ldexp(1.0, -k));
    const double fg = evaluate(support, variance, g).f;
    if ((f0 > 0.0) ? fg < 0.0 : fg > 0.0) {
      (f0 > 0.0 ? hi : lo) = g;
      closed = true;
      break;
    }
    (f0 > 0.0 ? lo : hi) = g;
  }
  if (!closed) throw EstimatorError("could not bracket the EVB multiplier");
  if (lo > hi) std::swap(lo, hi);

  // Safeguarded Newton on a decreasing function: f(lo) > 0 > f(hi).
  double g = 0.5 * (lo + hi);
  for (int it = 0; it < kMaxIterations; ++it) {
    const Moments m = evaluate(support, variance, g);
    if (m.f == 0.0) return g;
    if (m.f > 0.0) {
      lo = g;
    } else {
      hi = g;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
      return 0.5 * (lo + hi);
    }
    double next = g - m.f / m.slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (next == g) return g;
    g = next;
  }
  throw EstimatorError("EVB multiplier did not converge");
}

EvbSolution evb_distribution(const Lattice& support, double variance) {
  const double gamma = evb_gamma(support, variance);
  std::vector<double> p(support.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = support.point(i);
    const double denom = 1.0 + gamma * (x * x - variance);
    p[i] = 1.0 / (denom * denom);
    total += p[i];
  }
  double residual = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] /= total;
    const double x = support.point(i);
    residual += p[i] * (x * x - variance);
  }
  std::optional<double> scale;
  if (gamma > 0.0) scale = std::sqrt((1.0 - gamma * variance) / gamma);
  return EvbSolution{gamma, variance, scale, residual, Pmf(support, std::move(p))};
}

EntropyEstimate h_max_evb(const Lattice& support, double variance) {
  EntropyEstimate e;
  e.estimator = EstimatorKind::evb;
  e.aux.variance = variance;
  if (variance <= 0.0) {
    e.value = 0.0;
    return e;
  }
  try {
    const auto sol = evb_distribution(support, variance);
    e.value = h_max_pmf(sol.pmf);
    e.aux.gamma = sol.gamma;
  } catch (const EstimatorError&) {
    e.value = std::log2(static_cast<double>(support.size()));
    e.aux.fallback = true;
  }
  return e;
}

EntropyEstimate h_low_evb(const Lattice& support, double variance, double c) {
  auto e = h_max_evb(support, variance);
  e.value = h_low(e.value, c);
  return e;
}

}  // namespace siqrng
