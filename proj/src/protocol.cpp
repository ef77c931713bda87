#include "siqrng/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <spdlog/spdlog.h>

#include "siqrng/error.hpp"

namespace siqrng {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::dark_cal: return "dark_cal";
    case Phase::shot_cal: return "shot_cal";
    case Phase::check: return "check";
    case Phase::data: return "data";
  }
  return "unknown";
}

std::string_view to_string(AbortReason reason) {
  switch (reason) {
    case AbortReason::none: return "none";
    case AbortReason::saturation: return "saturation";
    case AbortReason::extreme_bin: return "extreme_bin";
    case AbortReason::negative_bound: return "negative_bound";
    case AbortReason::calibration_failure: return "calibration_failure";
  }
  return "unknown";
}

void ProtocolConfig::validate() const {
  if (n < 2) throw ConfigError("protocol.n must be at least 2");
  if (m < 2 || m % 2 != 0) throw ConfigError("protocol.m must be even and at least 2");
  if (!(check_probability > 0.0 && check_probability < 1.0)) {
    throw ConfigError("protocol.check_probability must lie in (0, 1)");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("security.epsilon must lie in (0, 1]");
  if (estimator == EstimatorKind::freq_min) throw ConfigError("freq_min cannot bound H_max");
  if (!(failure_rate >= 0.0 && failure_rate < 0.5)) throw ConfigError("estimator.failure_rate must lie in [0, 0.5)");
  if (!(confidence.concentration > 0.0)) throw ConfigError("estimator.concentration must be positive");
  if (calibration_samples == 1) throw ConfigError("protocol.calibration_samples must be 0 or at least 2");
  if (max_consecutive_aborts < 1) throw ConfigError("protocol.max_consecutive_aborts must be positive");
  if (reservoir_capacity < kDecisionBits) throw ConfigError("reservoir must hold at least one decision");
  if (bin_width && !(*bin_width > 0.0 && std::isfinite(*bin_width))) {
    throw ConfigError("detector.bin_width must be positive");
  }
  if (!bin_width && !std::isfinite(detector.range)) {
    throw ConfigError("an infinite detector.range needs an explicit detector.bin_width");
  }
  if (seed_mode == SeedSchedule::Mode::fresh && seed_file.empty()) {
    throw ConfigError("fresh seeds need extractor.seed_file");
  }
  try {
    source.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(detector.shot_var > detector.dark_var && detector.dark_var >= 0.0)) {
    throw ConfigError("detector needs shot_var > dark_var >= 0");
  }
  if (!(detector.range >= 0.0)) throw ConfigError("detector.range must be non-negative");
}

double ProtocolConfig::raw_bin_width() const { return bin_width ? *bin_width : 2.0 * detector.range / m; }

unsigned ProtocolConfig::decision_threshold() const {
  const auto t = static_cast<unsigned>(std::lround(check_probability * 128.0));
  return std::clamp(t, 1U, 127U);
}

std::size_t ProtocolConfig::raw_bits() const { return n * bits_per_sample(m); }

std::size_t BitReservoir::refill(const BitVector& bits) {
  const std::size_t take = std::min(room(), bits.size());
  if (take == 0) return 0;
  compact();
  bits_.append(bits.slice(0, take));
  return take;
}

std::uint64_t BitReservoir::take(unsigned count) {
  if (count > size()) throw InsufficientDataError("reservoir holds too few bits");
  const std::uint64_t v = bits_.read_bits(head_, count);
  head_ += count;
  return v;
}

BitVector BitReservoir::drain() {
  BitVector rest = bits_.slice(head_, size());
  bits_ = {};
  head_ = 0;
  return rest;
}

void BitReservoir::compact() {
  if (head_ == 0) return;
  bits_ = bits_.slice(head_, size());
  head_ = 0;
}

PhaseDecision decide_next_phase(BitReservoir& reservoir, unsigned threshold) {
  if (reservoir.size() < kDecisionBits) {
    spdlog::warn("decision reservoir depleted; forcing a check block");
    return {Phase::check, true, 0};
  }
  const auto v = static_cast<unsigned>(reservoir.take(kDecisionBits));
  return {v < threshold ? Phase::check : Phase::data, false, v};
}

SeedSchedule make_seed_schedule(const ProtocolConfig& config) {
  const std::size_t l_max = config.effective_l_max();
  const std::size_t n_raw = config.raw_bits();
  if (config.seed_mode == SeedSchedule::Mode::fresh) {
    return SeedSchedule::fresh(read_seed_file(config.seed_file), l_max, n_raw);
  }
  spdlog::warn("one Toeplitz matrix is reused for every block; outputs of different blocks are not independently secure");
  if (!config.seed_file.empty()) {
    const BitVector pool = read_seed_file(config.seed_file);
    const std::size_t need = ToeplitzSeed::required_bits(l_max, n_raw);
    if (pool.size() < need) throw ConfigError("seed file too short for the Toeplitz matrix");
    return SeedSchedule::reuse(ToeplitzSeed(pool.slice(0, need), l_max, n_raw));
  }
  std::mt19937_64 rng(config.master_seed ^ 0x5eedULL);
  return SeedSchedule::reuse(ToeplitzSeed::random(l_max, n_raw, rng));
}

ProtocolEngine::ProtocolEngine(ProtocolConfig config)
    : ProtocolEngine(config, (config.validate(), make_seed_schedule(config))) {}

ProtocolEngine::ProtocolEngine(ProtocolConfig config, SeedSchedule seeds)
    : config_(std::move(config)),
      source_(config_.source, config_.detector),
      seeds_(std::move(seeds)),
      rng_(config_.master_seed),
      reservoir_(config_.reservoir_capacity) {
  config_.validate();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RunReport abort_report(RunReport r, AbortReason reason) {
  r.aborted = true;
  r.reason = reason;
  r.secure_bits_emitted = 0;
  return r;
}

}  // namespace

BlockResult ProtocolEngine::finish(BlockResult r, double seconds) const {
  r.report.wall_time = seconds;
  if (r.report.aborted || r.report.phase != Phase::data) {
    r.report.secure_bits_emitted = 0;
    r.bits = {};
  }
  return r;
}

BlockResult ProtocolEngine::run_check_block(std::size_t block) {
  const auto t0 = Clock::now();
  BlockResult out;
  RunReport& r = out.report;
  r.block = block;
  r.phase = Phase::check;
  // A fresh check replaces the bound; until it succeeds nothing may be hashed.
  h_low_.reset();

  const std::size_t n_cal = config_.calibration_samples == 0 ? config_.n : config_.calibration_samples;
  try {
    r.dark_var = unbiased_variance(source_.draw_calibration(CalibrationStage::dark, n_cal));
    r.shot_var = unbiased_variance(source_.draw_calibration(CalibrationStage::shot, n_cal));
    if (!(r.shot_var > r.dark_var)) throw CalibrationError("shot noise not above dark noise");
  } catch (const Error&) {
    calibration_.reset();
    out.report = abort_report(r, AbortReason::calibration_failure);
    return finish(std::move(out), seconds_since(t0));
  }
  const double snu = std::sqrt(r.shot_var - r.dark_var);
  const double delta = config_.raw_bin_width() / snu;
  calibration_ = Calibration{r.shot_var, r.dark_var, delta};
  r.delta_p = delta;
  r.delta_q = delta;
  overlap_c_ = incompatibility_constant(r.delta_q, r.delta_p, config_.constant);

  RawBlock raw = source_.draw_block(Quadrature::check, config_.n);
  if (raw.saturated) {
    out.report = abort_report(r, AbortReason::saturation);
    return finish(std::move(out), seconds_since(t0));
  }
  auto x = normalize_snu(raw.samples, r.shot_var, r.dark_var);
  if (config_.subtract_mean) subtract_mean(x);
  const BinningScheme scheme(config_.m, delta);
  const Histogram h = accumulate(x, scheme);
  if (extreme_bin_check(h) == ExtremeBins::violated) {
    out.report = abort_report(r, AbortReason::extreme_bin);
    return finish(std::move(out), seconds_since(t0));
  }

  CheckStatistics stats{&h, 0.0, h.n};
  if (config_.estimator == EstimatorKind::evb) {
    stats.variance = config_.evb_variance == VarianceSource::raw_samples ? unbiased_variance(x) : bin_center_variance(h);
  }
  const EntropyEstimate point = point_estimate(config_.estimator, stats, config_.confidence);
  r.h_max_point = point.value;
  r.estimator_fallback = point.aux.fallback;
  if (config_.failure_rate > 0.0) {
    const EntropyEstimate upper = confidence_bound(config_.estimator, stats, config_.failure_rate, rng_, config_.confidence);
    r.h_max_est = upper.value;
    r.estimator_fallback = r.estimator_fallback || upper.aux.fallback;
  } else {
    r.h_max_est = point.value;
  }
  r.h_low_raw = h_low(r.h_max_point, overlap_c_);
  r.h_low_est = h_low(r.h_max_est, overlap_c_);
  if (!(r.h_low_est > 0.0)) {
    out.report = abort_report(r, AbortReason::negative_bound);
    return finish(std::move(out), seconds_since(t0));
  }
  h_low_ = r.h_low_est;
  return finish(std::move(out), seconds_since(t0));
}

BlockResult ProtocolEngine::run_data_block(std::size_t block) {
  if (!h_low_ || !calibration_) {
    auto converted = run_check_block(block);
    converted.report.forced = true;
    return converted;
  }
  const auto t0 = Clock::now();
  BlockResult out;
  RunReport& r = out.report;
  r.block = block;
  r.phase = Phase::data;
  r.shot_var = calibration_->shot_var;
  r.dark_var = calibration_->dark_var;
  r.delta_p = calibration_->delta;
  r.delta_q = calibration_->delta;
  r.h_low_used = *h_low_;

  RawBlock raw = source_.draw_block(Quadrature::data, config_.n);
  if (raw.saturated) {
    out.report = abort_report(r, AbortReason::saturation);
    return finish(std::move(out), seconds_since(t0));
  }
  auto x = normalize_snu(raw.samples, r.shot_var, r.dark_var);
  if (config_.subtract_mean) subtract_mean(x);
  const BinningScheme scheme(config_.m, r.delta_q);
  std::vector<int> indices(x.size());
  Histogram h(scheme);
  for (std::size_t i = 0; i < x.size(); ++i) {
    indices[i] = scheme.bin(x[i]);
    h.counts[scheme.slot(indices[i])] += 1;
  }
  h.n = x.size();
  r.h_min_monitor = h_min_freq(h).value;
  if (extreme_bin_check(h) == ExtremeBins::violated) {
    out.report = abort_report(r, AbortReason::extreme_bin);
    return finish(std::move(out), seconds_since(t0));
  }
  out.bits = extract_block(indices, config_.m, r.h_low_used, config_.epsilon, seeds_.next());
  r.secure_bits_emitted = out.bits.size();
  return finish(std::move(out), seconds_since(t0));
}

SessionReport ProtocolEngine::run_session(std::size_t blocks, const BitSink& bits, const ReportSink& reports) {
  if (blocks == 0) throw std::invalid_argument("a session needs at least one block");
  SessionReport s;
  s.seed_reused = seeds_.mode() == SeedSchedule::Mode::reuse;
  const auto t0 = Clock::now();
  int consecutive_aborts = 0;
  bool last_check_ok = false;

  auto bank = [&](const BitVector& v) {
    if (v.empty()) return;
    s.bits_banked += v.size();
    if (bits) bits(v);
  };

  for (std::size_t b = 0; b < blocks; ++b) {
    Phase phase = Phase::check;
    bool forced = true;
    if (b > 0) {
      const std::size_t before = reservoir_.size();
      PhaseDecision d = decide_next_phase(reservoir_, config_.decision_threshold());
      s.bits_consumed += before - reservoir_.size();
      if (d.depleted) {
        ++s.depletions;
        // After a good check with nothing to draw from, only a data block can
        // refill the reservoir; forcing yet another check would loop forever.
        phase = last_check_ok ? Phase::data : Phase::check;
      } else {
        phase = d.phase;
        forced = false;
      }
    }

    BlockResult res = phase == Phase::check ? run_check_block(b) : run_data_block(b);
    res.report.forced = res.report.forced || forced;
    const RunReport& r = res.report;

    if (r.phase == Phase::check) {
      ++s.check_blocks;
      last_check_ok = !r.aborted;
    } else {
      ++s.data_blocks;
      last_check_ok = false;
    }
    ++s.blocks;

    if (!res.bits.empty()) {
      s.bits_emitted += res.bits.size();
      const std::size_t kept = reservoir_.refill(res.bits);
      bank(res.bits.slice(kept, res.bits.size() - kept));
    }
    if (reports) reports(r);

    if (r.aborted) {
      ++s.aborted_blocks;
      if (++consecutive_aborts >= config_.max_consecutive_aborts) {
        s.session_aborted = true;
        s.session_abort_reason = r.reason;
        spdlog::error("session aborted after " + std::to_string(consecutive_aborts) + " consecutive aborted blocks (" +
                   std::string(to_string(r.reason)) + ")");
        break;
      }
    } else {
      consecutive_aborts = 0;
    }
  }
  bank(reservoir_.drain());
  s.wall_time = seconds_since(t0);
  return s;
}

void write_report_csv_header(std::ostream& out) {
  out << "block,phase,forced,shot_var,dark_var,delta_p,delta_q,h_max_est,h_max_point,h_low_est,h_low_raw,"
         "h_low_used,h_min_monitor,estimator_fallback,secure_bits_emitted,aborted,abort_reason,wall_time\n";
}

void write_report_csv_row(std::ostream& out, const RunReport& r) {
  out << r.block << ',' << to_string(r.phase) << ',' << int{r.forced} << ',' << r.shot_var << ',' << r.dark_var << ','
      << r.delta_p << ',' << r.delta_q << ',' << r.h_max_est << ',' << r.h_max_point << ',' << r.h_low_est << ','
      << r.h_low_raw << ',' << r.h_low_used << ',' << r.h_min_monitor << ',' << int{r.estimator_fallback} << ','
      << r.secure_bits_emitted << ',' << int{r.aborted} << ',' << to_string(r.reason) << ',' << r.wall_time << '\n';
}

}  // namespace siqrng
