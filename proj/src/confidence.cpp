#include "siqrng/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

#include "siqrng/error.hpp"
#include "siqrng/evb.hpp"

namespace siqrng {

namespace {

void check_failure_rate(double failure_rate) {
  if (!(failure_rate > 0.0 && failure_rate < 0.5)) {
    throw std::invalid_argument("failure rate must lie in (0, 0.5)");
  }
}

const Histogram& require_histogram(const CheckStatistics& data) {
  if (data.histogram == nullptr) throw std::invalid_argument("check statistics carry no histogram");
  return *data.histogram;
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw EmptyDataError("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

ConfidenceInterval dirichlet_h_max_interval(std::span<const std::uint64_t> counts, double prior_alpha,
                                            double failure_rate, std::size_t draws, std::mt19937_64& rng) {
  check_failure_rate(failure_rate);
  if (counts.empty()) throw EmptyDataError("no bins");
  if (!(prior_alpha > 0.0)) throw std::invalid_argument("Dirichlet prior parameter must be positive");
  if (draws < 2) throw InsufficientDataError("need at least two posterior draws");

  // One gamma_distribution per distinct shape; most bins share a handful of counts.
  std::vector<std::pair<double, std::gamma_distribution<double>>> shapes;
  std::vector<std::size_t> shape_of(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double a = static_cast<double>(counts[i]) + prior_alpha;
    auto it = std::find_if(shapes.begin(), shapes.end(), [a](const auto& s) { return s.first == a; });
    if (it == shapes.end()) {
      shapes.emplace_back(a, std::gamma_distribution<double>(a, 1.0));
      it = std::prev(shapes.end());
    }
    shape_of[i] = static_cast<std::size_t>(it - shapes.begin());
  }

  std::vector<double> values(draws);
  std::vector<double> g(counts.size());
  for (auto& v : values) {
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] = shapes[shape_of[i]].second(rng);
      total += g[i];
    }
    double s = 0.0;
    for (double x : g) s += std::sqrt(x);
    v = 2.0 * std::log2(s) - std::log2(total);
  }
  return {quantile(values, failure_rate), quantile(values, 1.0 - failure_rate), failure_rate};
}

ConfidenceInterval bootstrap_h_max_interval(std::span<const std::uint64_t> counts, double failure_rate,
                                            std::size_t resamples, std::mt19937_64& rng) {
  check_failure_rate(failure_rate);
  const auto n = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (n < 2) throw InsufficientDataError("bootstrap needs at least two samples");
  if (resamples < 2) throw InsufficientDataError("need at least two bootstrap resamples");

  std::vector<double> values(resamples);
  std::vector<std::uint64_t> draw(counts.size());
  for (auto& v : values) {
    // Multinomial(n, counts/n) by sequential conditional binomials.
    std::uint64_t left = n;
    std::uint64_t mass_left = n;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (left == 0 || counts[i] == 0) {
        draw[i] = 0;
      } else if (counts[i] >= mass_left) {
        draw[i] = left;
      } else {
        std::binomial_distribution<std::uint64_t> b(left, static_cast<double>(counts[i]) / mass_left);
        draw[i] = b(rng);
      }
      left -= draw[i];
      mass_left -= counts[i];
    }
    v = h_max_freq(draw).value;
  }
  return {quantile(values, failure_rate), quantile(values, 1.0 - failure_rate), failure_rate};
}

double variance_upper_limit(double variance, std::uint64_t n, double failure_rate) {
  check_failure_rate(failure_rate);
  if (n < 2) throw InsufficientDataError("variance limit needs n >= 2");
  const double dof = static_cast<double>(n - 1);
  const boost::math::chi_squared chi2(dof);
  return dof * variance / boost::math::quantile(chi2, failure_rate);
}

EntropyEstimate point_estimate(EstimatorKind kind, const CheckStatistics& data, const ConfidenceOptions& options) {
  switch (kind) {
    case EstimatorKind::freq_max: return h_max_freq(require_histogram(data));
    case EstimatorKind::bayes_up: return h_max_bayes_uniform(require_histogram(data));
    case EstimatorKind::bayes_pp: return h_max_bayes_peaked(require_histogram(data), options.concentration);
    case EstimatorKind::evb: {
      const auto& h = require_histogram(data);
      auto e = h_max_evb(h.scheme, data.variance);
      e.n = data.n;
      return e;
    }
    case EstimatorKind::freq_min: break;
  }
  throw std::invalid_argument("freq_min does not estimate H_max");
}

EntropyEstimate confidence_bound(EstimatorKind kind, const CheckStatistics& data, double failure_rate,
                                 std::mt19937_64& rng, const ConfidenceOptions& options) {
  EntropyEstimate e = point_estimate(kind, data, options);
  ConfidenceInterval ci;
  switch (kind) {
    case EstimatorKind::bayes_up:
      ci = dirichlet_h_max_interval(require_histogram(data).counts, 1.0, failure_rate, options.posterior_draws,
                                    rng);
      break;
    case EstimatorKind::bayes_pp:
      ci = dirichlet_h_max_interval(require_histogram(data).counts, options.concentration, failure_rate,
                                    options.posterior_draws, rng);
      break;
    case EstimatorKind::freq_max:
      ci = bootstrap_h_max_interval(require_histogram(data).counts, failure_rate, options.bootstrap_resamples,
                                    rng);
      break;
    case EstimatorKind::evb: {
      const auto& scheme = require_histogram(data).scheme;
      const double lower_v = data.variance * static_cast<double>(data.n - 1) /
                             boost::math::quantile(boost::math::complement(
                                 boost::math::chi_squared(static_cast<double>(data.n - 1)), failure_rate));
      const double upper_v = variance_upper_limit(data.variance, data.n, failure_rate);
      ci = {h_max_evb(scheme, lower_v).value, h_max_evb(scheme, upper_v).value, failure_rate};
      break;
    }
    case EstimatorKind::freq_min:
      throw std::invalid_argument("freq_min does not estimate H_max");
  }
  e.value = ci.high;
  e.ci = ci;
  return e;
}

}  // namespace siqrng
