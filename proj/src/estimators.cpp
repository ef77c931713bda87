#include "siqrng/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "siqrng/error.hpp"

namespace siqrng {

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::freq_min: return "freq_min";
    case EstimatorKind::freq_max: return "freq_max";
    case EstimatorKind::bayes_up: return "bayes_up";
    case EstimatorKind::bayes_pp: return "bayes_pp";
    case EstimatorKind::evb: return "evb";
  }
  return "unknown";
}

EstimatorKind estimator_from_string(std::string_view name) {
  if (name == "freq_min") return EstimatorKind::freq_min;
  if (name == "freq_max" || name == "freq") return EstimatorKind::freq_max;
  if (name == "bayes_up") return EstimatorKind::bayes_up;
  if (name == "bayes_pp") return EstimatorKind::bayes_pp;
  if (name == "evb") return EstimatorKind::evb;
  throw std::invalid_argument("unknown estimator: " + std::string(name));
}

double h_min_pmf(std::span<const double> p) {
  if (p.empty()) throw EmptyDataError("empty pmf");
  return -std::log2(*std::max_element(p.begin(), p.end()));
}

double h_max_pmf(std::span<const double> p) {
  if (p.empty()) throw EmptyDataError("empty pmf");
  double s = 0.0;
  for (double v : p) s += std::sqrt(v);
  return 2.0 * std::log2(s);
}

namespace {

std::uint64_t total(std::span<const std::uint64_t> counts) {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

EntropyEstimate make(double value, EstimatorKind kind, std::uint64_t n) {
  EntropyEstimate e;
  e.value = value;
  e.estimator = kind;
  e.n = n;
  return e;
}

}  // namespace

EntropyEstimate h_min_freq(std::span<const std::uint64_t> counts) {
  const auto n = total(counts);
  if (n == 0) throw EmptyDataError("frequentist min-entropy needs n >= 1");
  const auto top = *std::max_element(counts.begin(), counts.end());
  return make(-std::log2(static_cast<double>(top) / static_cast<double>(n)), EstimatorKind::freq_min, n);
}

EntropyEstimate h_max_freq(std::span<const std::uint64_t> counts) {
  const auto n = total(counts);
  if (n == 0) throw EmptyDataError("frequentist max-entropy needs n >= 1");
  double s = 0.0;
  for (auto c : counts) s += std::sqrt(static_cast<double>(c));
  // sum sqrt(n_k/n) = sum sqrt(n_k) / sqrt(n)
  const double value = 2.0 * std::log2(s) - std::log2(static_cast<double>(n));
  return make(value, EstimatorKind::freq_max, n);
}

EntropyEstimate h_max_bayes_uniform(std::span<const std::uint64_t> counts) {
  if (counts.empty()) throw EmptyDataError("no bins");
  const auto n = total(counts);
  const double nm = static_cast<double>(n) + static_cast<double>(counts.size());
  const double log_prefactor = std::lgamma(nm) - std::lgamma(nm + 0.5);

  // log-sum-exp over lgamma(n_k + 3/2) - lgamma(n_k + 1)
  std::vector<double> terms(counts.size());
  std::transform(counts.begin(), counts.end(), terms.begin(), [](std::uint64_t c) {
    const double x = static_cast<double>(c);
    return std::lgamma(x + 1.5) - std::lgamma(x + 1.0);
  });
  const double top = *std::max_element(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += std::exp(t - top);
  const double log_sum = top + std::log(s);

  return make(2.0 * (log_prefactor + log_sum) / std::numbers::ln2, EstimatorKind::bayes_up, n);
}

std::vector<double> posterior_mean_peaked(std::span<const std::uint64_t> counts, double concentration) {
  if (!(concentration >= 0.0)) throw std::invalid_argument("prior concentration must be >= 0");
  if (counts.empty()) throw EmptyDataError("no bins");
  const auto n = total(counts);
  if (n == 0 && concentration == 0.0) throw EmptyDataError("posterior undefined for K = 0 and n = 0");
  const double denom = static_cast<double>(n) + static_cast<double>(counts.size()) * concentration;
  std::vector<double> p(counts.size());
  std::transform(counts.begin(), counts.end(), p.begin(),
                 [&](std::uint64_t c) { return (static_cast<double>(c) + concentration) / denom; });
  return p;
}

EntropyEstimate h_max_bayes_peaked(std::span<const std::uint64_t> counts, double concentration) {
  auto e = make(h_max_pmf(posterior_mean_peaked(counts, concentration)), EstimatorKind::bayes_pp, total(counts));
  e.aux.concentration = concentration;
  return e;
}

EntropyEstimate h_min_freq(const Histogram& h) { return h_min_freq(h.counts); }
EntropyEstimate h_max_freq(const Histogram& h) { return h_max_freq(h.counts); }
EntropyEstimate h_max_bayes_uniform(const Histogram& h) { return h_max_bayes_uniform(h.counts); }

Pmf posterior_mean_peaked(const Histogram& h, double concentration) {
  return Pmf(h.scheme.centers(), posterior_mean_peaked(std::span<const std::uint64_t>(h.counts), concentration));
}

EntropyEstimate h_max_bayes_peaked(const Histogram& h, double concentration) {
  return h_max_bayes_peaked(std::span<const std::uint64_t>(h.counts), concentration);
}

double unbiased_variance(std::span<const double> samples) {
  if (samples.size() < 2) throw InsufficientDataError("variance needs at least two samples");
  // Two-pass for accuracy on long blocks.
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  double comp = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    ss += d * d;
    comp += d;
  }
  return (ss - comp * comp / n) / (n - 1.0);
}

double bin_center_variance(const Histogram& h) {
  if (h.n < 2) throw InsufficientDataError("variance needs at least two samples");
  const double n = static_cast<double>(h.n);
  double s1 = 0.0;
  for (int k = h.scheme.min_index(); k <= h.scheme.max_index(); ++k) {
    s1 += static_cast<double>(h.count(k)) * h.scheme.center(k);
  }
  const double mean = s1 / n;
  double ss = 0.0;
  for (int k = h.scheme.min_index(); k <= h.scheme.max_index(); ++k) {
    const double d = h.scheme.center(k) - mean;
    ss += static_cast<double>(h.count(k)) * d * d;
  }
  return ss / (n - 1.0);
}

Pmf symmetrize(const Pmf& q) {
  if (!q.support.is_symmetric()) throw std::invalid_argument("symmetrize needs a symmetric support");
  const std::size_t size = q.probs.size();
  std::vector<double> p(size);
  for (std::size_t i = 0; i < size; ++i) p[i] = 0.5 * (q.probs[i] + q.probs[size - 1 - i]);
  return Pmf(q.support, std::move(p));
}

Pmf rearrange_bins_min_variance(const Pmf& p) {
  const std::size_t size = p.probs.size();
  std::vector<std::size_t> slots(size);
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  // Nearest-to-zero first; on equal distance the positive point wins.
  std::stable_sort(slots.begin(), slots.end(), [&](std::size_t a, std::size_t b) {
    const int ka = p.support.index_at(a);
    const int kb = p.support.index_at(b);
    if (std::abs(ka) != std::abs(kb)) return std::abs(ka) < std::abs(kb);
    return ka > kb;
  });
  std::vector<double> sorted = p.probs;
  std::stable_sort(sorted.begin(), sorted.end(), std::greater<>());

  std::vector<double> out(size);
  for (std::size_t r = 0; r < size; ++r) out[slots[r]] = sorted[r];
  return Pmf(p.support, std::move(out));
}

}  // namespace siqrng
