#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "siqrng/discretization.hpp"
#include "siqrng/estimators.hpp"

namespace siqrng {

struct ConfidenceOptions {
  std::size_t posterior_draws = 10000;
  std::size_t bootstrap_resamples = 1000;
  double concentration = 100.0;  // K for bayes_pp
};

/// Everything a check block hands to the estimators.
struct CheckStatistics {
  const Histogram* histogram = nullptr;
  double variance = 0.0;  // unbiased sample variance fed to EVB
  std::uint64_t n = 0;
};

/// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

/// H_max of Dirichlet(counts + prior_alpha) draws; returns the (failure_rate,
/// 1 - failure_rate) quantile pair.
ConfidenceInterval dirichlet_h_max_interval(std::span<const std::uint64_t> counts, double prior_alpha,
                                            double failure_rate, std::size_t draws, std::mt19937_64& rng);

/// Multinomial bootstrap of the frequentist H_max.
ConfidenceInterval bootstrap_h_max_interval(std::span<const std::uint64_t> counts, double failure_rate,
                                            std::size_t resamples, std::mt19937_64& rng);

/// One-sided chi-square upper limit (n-1) V / chi2_{failure_rate}(n-1) on the
/// variance. Throws InsufficientDataError for n < 2.
double variance_upper_limit(double variance, std::uint64_t n, double failure_rate);

/// One-sided upper confidence value for H_max. The returned estimate's value is
/// the upper limit, and ci holds the two-sided quantile pair.
///   bayes_up / bayes_pp: quantile of H_max over posterior draws.
///   evb:   H_max^EVB at the upper variance limit (H_max^EVB increases with V).
///   freq_max: bootstrap quantile.
EntropyEstimate confidence_bound(EstimatorKind kind, const CheckStatistics& data, double failure_rate,
                                 std::mt19937_64& rng, const ConfidenceOptions& options = {});

/// Point estimate of H_max for the check block, by estimator kind.
EntropyEstimate point_estimate(EstimatorKind kind, const CheckStatistics& data,
                               const ConfidenceOptions& options = {});

}  // namespace siqrng
