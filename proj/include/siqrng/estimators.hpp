#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "siqrng/discretization.hpp"

namespace siqrng {

enum class EstimatorKind { freq_min, freq_max, bayes_up, bayes_pp, evb };

std::string_view to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(std::string_view name);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
  double failure_rate = 0.0;
};

struct EstimatorAux {
  std::optional<double> concentration;  // K of the peaked prior
  std::optional<double> gamma;          // EVB Lagrange multiplier
  std::optional<double> variance;       // EVB input variance
  bool fallback = false;                // EVB solver failed, value is log2(support size)
};

struct EntropyEstimate {
  double value = 0.0;  // bits
  EstimatorKind estimator = EstimatorKind::freq_max;
  std::uint64_t n = 0;
  EstimatorAux aux;
  std::optional<ConfidenceInterval> ci;
};

/// -log2 max_k p_k.
double h_min_pmf(std::span<const double> p);
/// 2 log2 sum_k sqrt(p_k) (Renyi order 1/2).
double h_max_pmf(std::span<const double> p);
inline double h_min_pmf(const Pmf& p) { return h_min_pmf(p.probs); }
inline double h_max_pmf(const Pmf& p) { return h_max_pmf(p.probs); }

// Count-vector forms work for any number of bins (the nine-bin study uses odd
// m); the Histogram overloads forward to them. All throw EmptyDataError on n = 0
// unless noted.
EntropyEstimate h_min_freq(std::span<const std::uint64_t> counts);
EntropyEstimate h_max_freq(std::span<const std::uint64_t> counts);
/// Uniform-Dirichlet-prior estimator. Works at n = 0; evaluated in log-gamma space.
EntropyEstimate h_max_bayes_uniform(std::span<const std::uint64_t> counts);
/// (n_j + K) / (n + m K). K = 0 with n = 0 throws EmptyDataError.
std::vector<double> posterior_mean_peaked(std::span<const std::uint64_t> counts, double concentration);
EntropyEstimate h_max_bayes_peaked(std::span<const std::uint64_t> counts, double concentration = 100.0);

EntropyEstimate h_min_freq(const Histogram& h);
EntropyEstimate h_max_freq(const Histogram& h);
EntropyEstimate h_max_bayes_uniform(const Histogram& h);
Pmf posterior_mean_peaked(const Histogram& h, double concentration);
EntropyEstimate h_max_bayes_peaked(const Histogram& h, double concentration = 100.0);

/// 1/(n-1) sum (x - mean)^2. Throws InsufficientDataError for n < 2.
double unbiased_variance(std::span<const double> samples);

/// Variance of the bin centers a histogram's samples fell into (edge bins at
/// their nominal centers), with the same 1/(n-1) normalization.
double bin_center_variance(const Histogram& h);

/// p_k = (q_k + q_{-k}) / 2 on a symmetric support.
Pmf symmetrize(const Pmf& q);

/// Same multiset of probabilities, largest at the point nearest 0, then
/// alternately outward (positive side first on ties of distance). The result
/// lives on the same support and has minimal variance among rearrangements.
Pmf rearrange_bins_min_variance(const Pmf& p);

}  // namespace siqrng
