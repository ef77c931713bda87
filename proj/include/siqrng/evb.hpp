#pragma once

#include <optional>

#include "siqrng/discretization.hpp"
#include "siqrng/estimators.hpp"

namespace siqrng {

// Extremal variance-based (EVB) max-entropy bound.
//
// For a support {x_k} and a variance V, the pmf maximizing 2 log2 sum sqrt(p_k)
// subject to sum p_k = 1 and sum p_k x_k^2 = V is
//
//     p_k  ∝  (1 + gamma (x_k^2 - V))^-2,
//
// a discretized Student's t with 3 degrees of freedom and scale
// s = sqrt((1 - gamma V) / gamma). gamma is the root of
//
//     f(gamma) = sum_k (x_k^2 - V) / (1 + gamma (x_k^2 - V))^2 = 0
//
// inside the interval where every denominator is positive. Each term of f is
// strictly decreasing there, so the admissible root is unique; it is also the
// real root closest to zero. We bracket it against the poles and polish with
// safeguarded Newton.

struct EvbSolution {
  double gamma = 0.0;
  double variance = 0.0;
  std::optional<double> scale;  // only for gamma > 0
  double residual = 0.0;        // sum_k p_k (x_k^2 - V): realized second moment minus V
  Pmf pmf;
};

/// Symmetric support [-m/2, m/2] * delta covering every bin center of the scheme.
/// The extra point keeps the support mirror-symmetric, which the extremal
/// construction relies on, and can only raise the bound.
Lattice evb_support(const BinningScheme& scheme);

/// Throws EstimatorError when V is not strictly between min x^2 and max x^2 or
/// the bracket cannot be closed.
double evb_gamma(const Lattice& support, double variance);

EvbSolution evb_distribution(const Lattice& support, double variance);

/// H_max of the extremal pmf. V <= 0 gives 0 (only the point mass at the origin
/// has zero variance after rearrangement). Solver failure falls back to
/// log2(support size) with aux.fallback set.
EntropyEstimate h_max_evb(const Lattice& support, double variance);
EntropyEstimate h_low_evb(const Lattice& support, double variance, double c);

inline EntropyEstimate h_max_evb(const BinningScheme& scheme, double variance) {
  return h_max_evb(evb_support(scheme), variance);
}
inline EntropyEstimate h_low_evb(const BinningScheme& scheme, double variance, double c) {
  return h_low_evb(evb_support(scheme), variance, c);
}

}  // namespace siqrng
