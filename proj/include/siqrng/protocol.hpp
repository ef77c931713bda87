#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "siqrng/bits.hpp"
#include "siqrng/confidence.hpp"
#include "siqrng/discretization.hpp"
#include "siqrng/estimators.hpp"
#include "siqrng/extractor.hpp"
#include "siqrng/source.hpp"
#include "siqrng/uncertainty.hpp"

namespace siqrng {

enum class Phase { dark_cal, shot_cal, check, data };
enum class AbortReason { none, saturation, extreme_bin, negative_bound, calibration_failure };

std::string_view to_string(Phase phase);
std::string_view to_string(AbortReason reason);

enum class VarianceSource { raw_samples, bin_centers };

struct ProtocolConfig {
  static constexpr double kDefaultDelta = 0.0155607;

  std::size_t n = 16000;
  int m = 4096;
  double check_probability = 0.1;
  double epsilon = 1e-10;

  EstimatorKind estimator = EstimatorKind::evb;
  double failure_rate = 0.01;  // 0 -> use the point estimate
  ConfidenceOptions confidence;
  VarianceSource evb_variance = VarianceSource::raw_samples;
  ConstantMode constant = ConstantMode::precise;

  SourceModel source = SourceModel::vacuum();
  // Default digitizer: 2R/m equals the default SNU bin width at unit shot noise.
  DetectorModel detector{0.0, 1.0, kDefaultDelta * 2048.0, 1};
  /// Raw (digitizer-unit) bin width; unset means 2 * range / m.
  std::optional<double> bin_width;

  std::size_t calibration_samples = 0;  // 0 -> n
  bool subtract_mean = false;
  int max_consecutive_aborts = 3;
  std::size_t reservoir_capacity = 128;

  std::size_t l_max = 0;  // 0 -> N_raw
  SeedSchedule::Mode seed_mode = SeedSchedule::Mode::reuse;
  std::filesystem::path seed_file;  // required for fresh mode; optional for reuse
  std::uint64_t master_seed = 2019;

  /// Throws ConfigError on a broken invariant.
  void validate() const;

  double raw_bin_width() const;
  unsigned decision_threshold() const;  // v < threshold out of 128 means check
  std::size_t raw_bits() const;         // N_raw = n * bits per sample
  std::size_t effective_l_max() const { return l_max == 0 ? raw_bits() : l_max; }
};

struct RunReport {
  std::size_t block = 0;
  Phase phase = Phase::check;
  bool forced = false;  // phase not drawn from the reservoir
  double shot_var = 0.0;
  double dark_var = 0.0;
  double delta_p = 0.0;
  double delta_q = 0.0;
  double h_max_est = 0.0;    // value the bound uses (confidence-adjusted if enabled)
  double h_max_point = 0.0;  // raw point estimate
  double h_low_est = 0.0;    // from h_max_est
  double h_low_raw = 0.0;    // from h_max_point
  double h_low_used = 0.0;   // data blocks: the stored bound they hashed with
  double h_min_monitor = 0.0;
  bool estimator_fallback = false;
  std::uint64_t secure_bits_emitted = 0;
  bool aborted = false;
  AbortReason reason = AbortReason::none;
  double wall_time = 0.0;  // seconds
};

/// Reports of one block plus the secure bits it produced (data blocks only).
struct BlockResult {
  RunReport report;
  BitVector bits;
};

// FIFO of extracted bits set aside to steer the check/data decision.
class BitReservoir {
 public:
  explicit BitReservoir(std::size_t capacity = 128) : capacity_(capacity) {}

  std::size_t size() const { return bits_.size() - head_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t room() const { return capacity_ > size() ? capacity_ - size() : 0; }

  /// Takes up to room() bits from the front of `bits`; returns how many.
  std::size_t refill(const BitVector& bits);
  /// Pops `count` bits as an integer, first bit most significant.
  std::uint64_t take(unsigned count);
  /// Empties the reservoir, returning what was left.
  BitVector drain();

 private:
  void compact();

  std::size_t capacity_;
  BitVector bits_;
  std::size_t head_ = 0;
};

struct PhaseDecision {
  Phase phase = Phase::check;
  bool depleted = false;  // fewer than 7 bits available; nothing consumed
  unsigned value = 0;
};

inline constexpr unsigned kDecisionBits = 7;

/// Consumes 7 bits and returns check iff the value is below `threshold`
/// (13 of 128 by default). With fewer than 7 bits, returns a forced check and
/// consumes nothing.
PhaseDecision decide_next_phase(BitReservoir& reservoir, unsigned threshold = 13);

struct Calibration {
  double shot_var = 0.0;
  double dark_var = 0.0;
  double delta = 0.0;  // SNU bin width
};

struct SessionReport {
  std::size_t blocks = 0;
  std::size_t check_blocks = 0;
  std::size_t data_blocks = 0;
  std::size_t aborted_blocks = 0;
  std::size_t depletions = 0;
  bool session_aborted = false;
  AbortReason session_abort_reason = AbortReason::none;
  std::uint64_t bits_emitted = 0;
  std::uint64_t bits_consumed = 0;  // spent on phase decisions
  std::uint64_t bits_banked = 0;    // delivered to the output
  double wall_time = 0.0;
  bool seed_reused = false;

  double check_fraction() const { return blocks == 0 ? 0.0 : static_cast<double>(check_blocks) / blocks; }
  double bit_rate() const { return wall_time > 0.0 ? static_cast<double>(bits_emitted) / wall_time : 0.0; }
};

// The self-testing state machine. One instance owns the simulated source, the
// seed schedule and the decision reservoir for a session.
class ProtocolEngine {
 public:
  explicit ProtocolEngine(ProtocolConfig config);
  ProtocolEngine(ProtocolConfig config, SeedSchedule seeds);

  /// Dark and shot calibration, then n samples of the check quadrature.
  BlockResult run_check_block(std::size_t block = 0);
  /// n samples of the data quadrature hashed with the stored bound. Without a
  /// stored bound the block runs as a (forced) check instead.
  BlockResult run_data_block(std::size_t block = 0);

  using BitSink = std::function<void(const BitVector&)>;
  using ReportSink = std::function<void(const RunReport&)>;

  /// Runs up to `blocks` blocks. Banked bits go to `bits`, one report per block
  /// to `reports`. Stops early after max_consecutive_aborts aborted blocks in a
  /// row. Leftover reservoir bits are banked at the end.
  SessionReport run_session(std::size_t blocks, const BitSink& bits = {}, const ReportSink& reports = {});

  const ProtocolConfig& config() const { return config_; }
  const std::optional<double>& stored_h_low() const { return h_low_; }
  const std::optional<Calibration>& calibration() const { return calibration_; }
  BitReservoir& reservoir() { return reservoir_; }

 private:
  BlockResult finish(BlockResult r, double seconds) const;

  ProtocolConfig config_;
  QuadratureSource source_;
  SeedSchedule seeds_;
  std::mt19937_64 rng_;  // estimator sampling
  BitReservoir reservoir_;
  double overlap_c_ = 0.0;
  std::optional<Calibration> calibration_;
  std::optional<double> h_low_;
};

/// Builds the Toeplitz seed schedule a config asks for.
SeedSchedule make_seed_schedule(const ProtocolConfig& config);

/// CSV header and rows with every RunReport field.
void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const RunReport& r);

}  // namespace siqrng
