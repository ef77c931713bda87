#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "siqrng/estimators.hpp"
#include "siqrng/source.hpp"
#include "siqrng/uncertainty.hpp"

namespace siqrng {

// ---- Theory curves -------------------------------------------------------

struct TheoryPoint {
  std::string label;
  double v_check = 1.0;
  double v_data = 1.0;
  double delta = 0.0;
  int m = 0;
  double h_min_q = 0.0;  // H_min of the data quadrature
  double h_max_p = 0.0;  // H_max of the check quadrature
  double c = 0.0;
  double h_low_p = 0.0;  // bound from the check quadrature
};

/// Closed-form discretized-Gaussian entropies for one source.
TheoryPoint theory_point(const SourceModel& source, double delta, int m,
                         ConstantMode mode = ConstantMode::precise);

/// Minimum-uncertainty pair: P with standard deviation sigma_p, Q with 1/sigma_p.
TheoryPoint theory_point_pure(double sigma_p, double delta, int m, ConstantMode mode = ConstantMode::precise);

void write_theory_csv(std::ostream& out, const std::vector<TheoryPoint>& points);

// ---- Estimator bias simulation ------------------------------------------

struct BiasSimConfig {
  std::vector<EstimatorKind> estimators{EstimatorKind::freq_max, EstimatorKind::freq_min, EstimatorKind::bayes_up,
                                        EstimatorKind::bayes_pp, EstimatorKind::evb};
  std::vector<std::size_t> n_values{16000};
  std::size_t repetitions = 1000;
  SourceModel source = SourceModel::vacuum();
  double delta = 0.0155607;
  int m = 4096;
  double concentration = 100.0;
  ConstantMode constant = ConstantMode::precise;
  std::uint64_t seed = 2019;
  unsigned threads = 0;  // 0 -> hardware concurrency
};

// One (estimator, n) cell. freq_min rows describe H_min of the data quadrature;
// every other row describes H_low derived from the check quadrature.
struct BiasRow {
  EstimatorKind estimator = EstimatorKind::freq_max;
  std::string quantity;  // "h_low" or "h_min"
  std::size_t n = 0;
  std::size_t repetitions = 0;
  double mean = 0.0;
  double std = 0.0;
  double stderr_mean = 0.0;
  double theory = 0.0;
  std::size_t fallbacks = 0;
};

/// Rows sorted by (estimator, n). Deterministic for a fixed seed regardless of
/// the thread count.
std::vector<BiasRow> bias_simulation(const BiasSimConfig& config);
void write_bias_csv(std::ostream& out, const std::vector<BiasRow>& rows);

// ---- Nine-bin study ------------------------------------------------------

struct NineBinPmf {
  std::string name;
  std::vector<double> p;  // nine probabilities on k = -4..4
};

/// Built-in substitutes: uniform, single_peak, bimodal.
std::vector<NineBinPmf> builtin_ninebin_pmfs();
/// Nine non-negative numbers summing to 1 (separated by whitespace or commas).
NineBinPmf load_ninebin_pmf(const std::filesystem::path& path);

struct NineBinConfig {
  std::vector<NineBinPmf> pmfs = builtin_ninebin_pmfs();
  std::vector<std::size_t> n_values{20, 100, 1000};
  std::size_t repetitions = 1000;
  double concentration = 100.0;
  std::uint64_t seed = 2019;
};

struct NineBinRow {
  std::string pmf;
  EstimatorKind estimator = EstimatorKind::freq_max;
  std::size_t n = 0;
  std::size_t repetitions = 0;
  double mean = 0.0;
  double std = 0.0;
  double stderr_mean = 0.0;
  double theory = 0.0;  // H_max of the true pmf
  bool below = false;   // mean < theory
};

std::vector<NineBinRow> ninebin_study(const NineBinConfig& config);
void write_ninebin_csv(std::ostream& out, const std::vector<NineBinRow>& rows);

// ---- Self-test -----------------------------------------------------------

/// Fast end-to-end sanity checks; one line per check to `out`. True iff all pass.
bool run_selftest(std::ostream& out, std::uint64_t seed = 2019);

}  // namespace siqrng
