#include <algorithm>
#include <cmath>
#include <sstream>

#include <doctest.h>
#include <spdlog/spdlog.h>

#include "oracles/frozen.hpp"
#include "siqrng/error.hpp"
#include "siqrng/evb.hpp"
#include "siqrng/protocol.hpp"

using namespace siqrng;

namespace {

const bool quiet = (spdlog::set_level(spdlog::level::off), true);

ProtocolConfig small_config(std::size_t n = 2000) {
  ProtocolConfig c;
  c.n = n;
  return c;
}

BitReservoir filled(std::uint64_t value, unsigned width) {
  BitReservoir r;
  BitVector b;
  b.append_bits(value, width);
  r.refill(b);
  return r;
}

}  // namespace

TEST_CASE("phase decisions") {
  auto zero = filled(0, 7);
  auto d = decide_next_phase(zero);
  CHECK(d.phase == Phase::check);
  CHECK_FALSE(d.depleted);
  CHECK(zero.size() == 0);

  auto ones = filled(127, 7);
  d = decide_next_phase(ones);
  CHECK(d.phase == Phase::data);
  CHECK(d.value == 127);

  int checks = 0;
  for (unsigned v = 0; v < 128; ++v) {
    auto r = filled(v, 7);
    if (decide_next_phase(r).phase == Phase::check) ++checks;
  }
  CHECK(checks == 13);

  auto six = filled(0, 6);
  d = decide_next_phase(six);
  CHECK(d.depleted);
  CHECK(d.phase == Phase::check);
  CHECK(six.size() == 6);
  CHECK(ProtocolConfig{}.decision_threshold() == 13);
}

TEST_CASE("reservoir") {
  BitReservoir r(128);
  CHECK(r.refill(BitVector(200)) == 128);
  CHECK(r.room() == 0);
  CHECK(r.take(7) == 0);
  CHECK(r.size() == 121);
  CHECK(r.refill(BitVector::from_ascii("1111111111")) == 7);
  CHECK(r.size() == 128);
  CHECK_THROWS_AS(r.take(65), DimensionError);
  const BitVector rest = r.drain();
  CHECK(rest.size() == 128);
  CHECK(rest.count_ones() == 7);
  CHECK(r.size() == 0);
  CHECK_THROWS(r.take(1));
}

TEST_CASE("vacuum check block matches the extremal bound at unit variance") {
  auto cfg = small_config(16000);
  cfg.failure_rate = 0.0;
  cfg.calibration_samples = 400000;
  ProtocolEngine eng(cfg);
  const auto res = eng.run_check_block();
  const auto& r = res.report;
  REQUIRE_FALSE(r.aborted);
  CHECK(r.phase == Phase::check);
  CHECK(res.bits.empty());
  CHECK(r.delta_q == doctest::Approx(frozen::kDelta).epsilon(0.01));
  const BinningScheme s(cfg.m, r.delta_q);
  const double c = incompatibility_constant(r.delta_q, r.delta_p);
  CHECK(r.h_low_raw == doctest::Approx(h_low_evb(s, 1.0, c).value).epsilon(0.01));
  // The extremal pmf is wider than the Gaussian one, so the bound is a little lower.
  CHECK(r.h_low_raw < frozen::kVacuumHLow);
  CHECK(r.h_low_raw > frozen::kVacuumHLow - 0.5);
  REQUIRE(eng.stored_h_low().has_value());
  CHECK(*eng.stored_h_low() == r.h_low_est);
}

TEST_CASE("confidence adjustment lowers the bound") {
  auto cfg = small_config(16000);
  ProtocolEngine eng(cfg);
  const auto r = eng.run_check_block().report;
  REQUIRE_FALSE(r.aborted);
  CHECK(r.h_max_est > r.h_max_point);
  CHECK(r.h_low_est < r.h_low_raw);
}

TEST_CASE("abort paths") {
  SUBCASE("saturation") {
    auto cfg = small_config();
    cfg.detector.range = 0.0;
    cfg.bin_width = 0.03;
    ProtocolEngine eng(cfg);
    const auto r = eng.run_check_block().report;
    CHECK(r.aborted);
    CHECK(r.reason == AbortReason::saturation);
    CHECK_FALSE(eng.stored_h_low().has_value());
  }
  SUBCASE("extreme bin") {
    auto cfg = small_config();
    cfg.bin_width = 1e-4;
    ProtocolEngine eng(cfg);
    const auto r = eng.run_check_block().report;
    CHECK(r.reason == AbortReason::extreme_bin);
    CHECK_FALSE(eng.stored_h_low().has_value());
  }
  SUBCASE("negative bound") {
    auto cfg = small_config(1000);
    cfg.m = 6;
    cfg.bin_width = 3.0;
    cfg.estimator = EstimatorKind::freq_max;
    cfg.failure_rate = 0.0;
    ProtocolEngine eng(cfg);
    const auto r = eng.run_check_block().report;
    CHECK(r.reason == AbortReason::negative_bound);
    CHECK(r.h_low_est <= 0.0);
  }
  SUBCASE("calibration failure") {
    auto cfg = small_config();
    cfg.calibration_samples = 2;
    cfg.detector.dark_var = 0.9;
    int failures = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      cfg.detector.seed = seed;
      ProtocolEngine eng(cfg);
      const auto r = eng.run_check_block().report;
      if (r.reason == AbortReason::calibration_failure) {
        ++failures;
        CHECK_FALSE(eng.calibration().has_value());
      }
    }
    CHECK(failures > 0);
    cfg.calibration_samples = 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
}

TEST_CASE("data block without a bound runs as a forced check") {
  ProtocolEngine eng(small_config());
  const auto res = eng.run_data_block(5);
  CHECK(res.report.phase == Phase::check);
  CHECK(res.report.forced);
  CHECK(res.report.block == 5);
  CHECK(res.bits.empty());
}

TEST_CASE("data block emits the secure length") {
  auto cfg = small_config();
  ProtocolEngine eng(cfg);
  REQUIRE_FALSE(eng.run_check_block().report.aborted);
  const auto res = eng.run_data_block(1);
  const auto& r = res.report;
  REQUIRE_FALSE(r.aborted);
  CHECK(r.phase == Phase::data);
  CHECK(r.h_low_used == *eng.stored_h_low());
  const auto expected = std::min<std::uint64_t>(secure_length(cfg.n, r.h_low_used, cfg.epsilon), cfg.effective_l_max());
  CHECK(r.secure_bits_emitted == expected);
  CHECK(res.bits.size() == expected);
  // plug-in min-entropy of 2000 samples reads low
  CHECK(r.h_min_monitor < frozen::kVacuumHMin);
  CHECK(r.h_min_monitor > frozen::kVacuumHMin - 1.5);
  // The bound stays in force for the next data block.
  CHECK(eng.run_data_block(2).report.phase == Phase::data);
}

TEST_CASE("single-block session") {
  ProtocolEngine eng(small_config());
  const auto s = eng.run_session(1);
  CHECK(s.blocks == 1);
  CHECK(s.check_blocks == 1);
  CHECK(s.data_blocks == 0);
  CHECK(s.bits_emitted == 0);
  CHECK_THROWS(eng.run_session(0));
}

TEST_CASE("session accounting and ordering") {
  auto cfg = small_config(1000);
  ProtocolEngine eng(cfg);
  std::uint64_t sunk = 0;
  std::vector<RunReport> reports;
  const auto s = eng.run_session(
      1000, [&](const BitVector& b) { sunk += b.size(); }, [&](const RunReport& r) { reports.push_back(r); });
  CHECK(s.blocks == 1000);
  CHECK_FALSE(s.session_aborted);
  CHECK(s.bits_consumed + s.bits_banked == s.bits_emitted);
  CHECK(sunk == s.bits_banked);
  CHECK(s.check_blocks + s.data_blocks == s.blocks);
  CHECK(std::abs(s.check_fraction() - 13.0 / 128.0) < 0.03);
  CHECK(s.seed_reused);
  CHECK(s.bit_rate() > 0.0);

  REQUIRE(reports.size() == 1000);
  CHECK(reports[0].phase == Phase::check);
  CHECK(reports[0].forced);
  bool bound_ok = false;
  std::size_t ordered = 0;
  for (const auto& r : reports) {
    if (r.phase == Phase::check) {
      bound_ok = !r.aborted;
    } else if (bound_ok) {
      ++ordered;
    }
  }
  CHECK(ordered == s.data_blocks);
}

TEST_CASE("repeated aborts end the session") {
  auto cfg = small_config();
  cfg.bin_width = 1e-4;
  ProtocolEngine eng(cfg);
  std::vector<RunReport> reports;
  const auto s = eng.run_session(50, {}, [&](const RunReport& r) { reports.push_back(r); });
  CHECK(s.session_aborted);
  CHECK(s.session_abort_reason == AbortReason::extreme_bin);
  CHECK(s.blocks == 3);
  CHECK(s.data_blocks == 0);
  CHECK(s.bits_emitted == 0);
  for (const auto& r : reports) CHECK(r.phase == Phase::check);
}

TEST_CASE("squeezed check quadrature yields more bits") {
  auto vac = small_config(4000);
  auto sq = vac;
  sq.source = SourceModel::squeezed(5.0, 0.0);
  ProtocolEngine a(vac), b(sq);
  a.run_check_block();
  b.run_check_block();
  const auto ba = a.run_data_block().report.secure_bits_emitted;
  const auto bb = b.run_data_block().report.secure_bits_emitted;
  CHECK(bb > ba);
}

TEST_CASE("thermal check noise lowers the bound") {
  double prev = INFINITY;
  for (double v : {1.0, 2.0, 4.0}) {
    auto cfg = small_config(16000);
    cfg.source = SourceModel::thermal(v);
    ProtocolEngine eng(cfg);
    const auto r = eng.run_check_block().report;
    REQUIRE_FALSE(r.aborted);
    CHECK(r.h_low_est < prev);
    prev = r.h_low_est;
  }
}

TEST_CASE("configuration checks") {
  ProtocolConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.raw_bits() == 192000);
  CHECK(c.effective_l_max() == 192000);
  CHECK(c.raw_bin_width() == doctest::Approx(frozen::kDelta));
  auto bad = c;
  bad.m = 7;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.estimator = EstimatorKind::freq_min;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.seed_mode = SeedSchedule::Mode::fresh;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.detector.range = INFINITY;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.bin_width = 0.03;
  CHECK_NOTHROW(bad.validate());
  bad = c;
  bad.check_probability = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("report CSV") {
  std::ostringstream os;
  write_report_csv_header(os);
  RunReport r;
  r.phase = Phase::data;
  r.reason = AbortReason::saturation;
  write_report_csv_row(os, r);
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(row.find(",data,") != std::string::npos);
  CHECK(row.find(",saturation,") != std::string::npos);
}
