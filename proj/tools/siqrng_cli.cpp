// Command-line front end: protocol sessions, estimator studies, theory curves,
// bit export and a quick self-test.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "siqrng/bits.hpp"
#include "siqrng/config.hpp"
#include "siqrng/error.hpp"
#include "siqrng/harness.hpp"
#include "siqrng/protocol.hpp"
#include "siqrng/randomness_tests.hpp"

namespace {

using namespace siqrng;

enum Exit : int { kOk = 0, kConfigError = 1, kSessionAbort = 2, kSelftestFailure = 3 };

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key=value configuration file");
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--out", c.out, "output path");
  cmd->add_option("--set", c.overrides, "config override key=value (repeatable)");
}

RunSettings load_settings(const Common& c) {
  ConfigMap map;
  if (!c.config_path.empty()) map = load_config_file(c.config_path);
  for (const auto& o : c.overrides) apply_override(map, o);
  if (c.seed) {
    map["seed"] = std::to_string(*c.seed);
    if (!map.contains("detector.seed")) map["detector.seed"] = std::to_string(*c.seed);
  }
  return settings_from(map);
}

// Writes to the file at `path`, or stdout when empty.
class Output {
 public:
  explicit Output(const std::string& path, bool binary = false) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, binary ? std::ios::binary : std::ios::out);
      if (!*file_) throw Error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int cmd_run(const Common& c, const std::string& log_path, std::optional<std::size_t> blocks, bool ascii) {
  RunSettings s = load_settings(c);
  if (blocks) s.blocks = *blocks;
  ProtocolEngine engine(s.protocol);

  std::unique_ptr<std::ofstream> bits_out;
  if (!c.out.empty()) {
    bits_out = std::make_unique<std::ofstream>(c.out, ascii ? std::ios::out : std::ios::binary);
    if (!*bits_out) throw Error("cannot write " + c.out);
  }
  // Packed output must stay byte aligned across blocks; carry the remainder.
  BitVector pending;
  auto sink = [&](const BitVector& v) {
    if (!bits_out) return;
    if (ascii) {
      *bits_out << v.to_ascii();
      return;
    }
    pending.append(v);
    const std::size_t whole = pending.size() / 8 * 8;
    write_packed(*bits_out, pending.slice(0, whole));
    pending = pending.slice(whole, pending.size() - whole);
  };

  std::unique_ptr<std::ofstream> log;
  if (!log_path.empty()) {
    log = std::make_unique<std::ofstream>(log_path);
    if (!*log) throw Error("cannot write " + log_path);
    write_report_csv_header(*log);
  }
  auto reports = [&](const RunReport& r) {
    if (log) write_report_csv_row(*log, r);
    std::cerr << "block " << r.block << ' ' << to_string(r.phase) << (r.forced ? " (forced)" : "");
    if (r.aborted) {
      std::cerr << " ABORT " << to_string(r.reason);
    } else if (r.phase == Phase::check) {
      std::cerr << " h_max=" << r.h_max_est << " h_low=" << r.h_low_est;
    } else {
      std::cerr << " h_min=" << r.h_min_monitor << " bits=" << r.secure_bits_emitted;
    }
    std::cerr << '\n';
  };

  const SessionReport rep = engine.run_session(s.blocks, sink, reports);
  if (bits_out && !ascii && !pending.empty()) write_packed(*bits_out, pending);
  if (bits_out && ascii) *bits_out << '\n';

  std::cout << "blocks=" << rep.blocks << " check=" << rep.check_blocks << " data=" << rep.data_blocks
            << " aborted=" << rep.aborted_blocks << " check_fraction=" << rep.check_fraction()
            << " bits_emitted=" << rep.bits_emitted << " bits_banked=" << rep.bits_banked
            << " bits_consumed=" << rep.bits_consumed << " wall_time=" << rep.wall_time
            << "s bit_rate=" << rep.bit_rate() << " bit/s\n";
  if (rep.session_aborted) {
    std::cout << "session aborted: " << to_string(rep.session_abort_reason) << '\n';
    return kSessionAbort;
  }
  return kOk;
}

std::vector<std::size_t> parse_sizes(const std::vector<double>& v) {
  std::vector<std::size_t> out;
  for (double x : v) {
    if (!(x >= 1.0)) throw ConfigError("sample sizes must be positive");
    out.push_back(static_cast<std::size_t>(std::llround(x)));
  }
  return out;
}

int cmd_bias_sim(const Common& c, const std::vector<std::string>& estimators, const std::vector<double>& ns,
                 std::size_t reps, unsigned threads) {
  const RunSettings s = load_settings(c);
  BiasSimConfig b;
  if (!estimators.empty()) {
    b.estimators.clear();
    for (const auto& e : estimators) {
      try {
        b.estimators.push_back(estimator_from_string(e));
      } catch (const std::invalid_argument& ex) {
        throw ConfigError(ex.what());
      }
    }
  }
  if (!ns.empty()) b.n_values = parse_sizes(ns);
  if (reps < 2) throw ConfigError("--repetitions must be at least 2");
  b.repetitions = reps;
  b.source = s.protocol.source;
  b.m = s.protocol.m;
  b.constant = s.protocol.constant;
  b.concentration = s.protocol.confidence.concentration;
  b.seed = s.protocol.master_seed;
  b.threads = threads;
  Output out(c.out);
  write_bias_csv(out.stream(), bias_simulation(b));
  return kOk;
}

int cmd_ninebin(const Common& c, const std::vector<std::string>& files, const std::vector<double>& ns, std::size_t reps,
                bool builtins) {
  const RunSettings s = load_settings(c);
  NineBinConfig nb;
  if (!builtins) nb.pmfs.clear();
  for (const auto& f : files) {
    try {
      nb.pmfs.push_back(load_ninebin_pmf(f));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (nb.pmfs.empty()) throw ConfigError("no distributions to study");
  if (!ns.empty()) nb.n_values = parse_sizes(ns);
  if (reps < 2) throw ConfigError("--repetitions must be at least 2");
  nb.repetitions = reps;
  nb.concentration = s.protocol.confidence.concentration;
  nb.seed = s.protocol.master_seed;
  const auto rows = ninebin_study(nb);
  Output out(c.out);
  write_ninebin_csv(out.stream(), rows);
  for (const auto& r : rows) {
    if (r.below) {
      std::cerr << "negative H_max bias: " << r.pmf << ' ' << to_string(r.estimator) << " n=" << r.n << '\n';
    }
  }
  return kOk;
}

int cmd_theory(const Common& c, const std::vector<double>& deltas, const std::vector<double>& thermal,
               const std::vector<double>& squeezing, double loss) {
  const RunSettings s = load_settings(c);
  std::vector<TheoryPoint> points;
  const std::vector<double> ds = deltas.empty() ? std::vector<double>{ProtocolConfig::kDefaultDelta} : deltas;
  for (double d : ds) {
    if (!(d > 0.0)) throw ConfigError("delta must be positive");
    points.push_back(theory_point(s.protocol.source, d, s.protocol.m, s.protocol.constant));
    for (double v : thermal) points.push_back(theory_point(SourceModel::thermal(v), d, s.protocol.m, s.protocol.constant));
    for (double db : squeezing) {
      points.push_back(theory_point(SourceModel::squeezed(db, loss), d, s.protocol.m, s.protocol.constant));
    }
  }
  Output out(c.out);
  write_theory_csv(out.stream(), points);
  return kOk;
}

int cmd_nist_export(const Common& c, const std::string& input, std::size_t sample_bits, bool suite) {
  BitVector bits;
  if (!input.empty()) {
    bits = read_bit_file(input);
  } else {
    const RunSettings s = load_settings(c);
    ProtocolEngine engine(s.protocol);
    engine.run_session(s.blocks, [&](const BitVector& v) { bits.append(v); });
  }
  {
    Output out(c.out);
    write_ascii(out.stream(), bits);
  }
  std::cerr << "exported " << bits.size() << " bits\n";
  if (suite) {
    std::vector<BitVector> samples;
    for (std::size_t off = 0; off + sample_bits <= bits.size(); off += sample_bits) {
      samples.push_back(bits.slice(off, sample_bits));
    }
    if (samples.size() < 2) {
      std::cerr << "not enough bits for two samples of " << sample_bits << '\n';
      return kOk;
    }
    const auto summary = run_suite(samples);
    write_summary_csv(std::cout, summary);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-testing quantum random number generator: protocol simulation and analysis"};
  app.require_subcommand(1);
  Common common;
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "only log errors");

  auto* run = app.add_subcommand("run", "run a protocol session");
  add_common(run, common);
  std::string log_path;
  std::optional<std::size_t> blocks;
  bool ascii = false;
  run->add_option("--log", log_path, "per-block CSV log");
  run->add_option("--blocks", blocks, "number of blocks");
  run->add_flag("--ascii", ascii, "write secure bits as ASCII 0/1");

  auto* bias = app.add_subcommand("bias-sim", "estimator bias simulation");
  add_common(bias, common);
  std::vector<std::string> estimators;
  std::vector<double> ns;
  std::size_t reps = 1000;
  unsigned threads = 0;
  bias->add_option("--estimators", estimators, "freq_min freq_max bayes_up bayes_pp evb");
  bias->add_option("--n", ns, "sample sizes");
  bias->add_option("--repetitions", reps, "repetitions per point");
  bias->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* nine = app.add_subcommand("ninebin", "nine-bin estimator study");
  add_common(nine, common);
  std::vector<std::string> pmf_files;
  std::vector<double> nine_ns;
  std::size_t nine_reps = 1000;
  bool no_builtins = false;
  nine->add_option("--pmf", pmf_files, "custom 9-bin pmf files");
  nine->add_option("--n", nine_ns, "sample sizes");
  nine->add_option("--repetitions", nine_reps, "repetitions per point");
  nine->add_flag("--no-builtins", no_builtins, "skip the built-in distributions");

  auto* theory = app.add_subcommand("theory", "closed-form entropy curves");
  add_common(theory, common);
  std::vector<double> deltas, thermal, squeezing;
  double loss = 0.0;
  theory->add_option("--delta", deltas, "bin widths in shot-noise units");
  theory->add_option("--thermal", thermal, "thermal variances to add");
  theory->add_option("--squeezing-db", squeezing, "squeezing levels to add");
  theory->add_option("--loss", loss, "loss for the squeezing sweep");

  auto* nist = app.add_subcommand("nist-export", "export bits as ASCII for external test suites");
  add_common(nist, common);
  std::string input;
  std::size_t sample_bits = 100000;
  bool suite = false;
  nist->add_option("--input", input, "existing bit file (packed or ASCII); default runs a session");
  nist->add_option("--sample-bits", sample_bits, "bits per sample for --suite");
  nist->add_flag("--suite", suite, "also run the native tests");

  auto* self = app.add_subcommand("selftest", "quick end-to-end checks");
  add_common(self, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }
  spdlog::set_level(quiet ? spdlog::level::err : spdlog::level::info);
  spdlog::set_pattern("[%l] %v");

  try {
    if (*run) return cmd_run(common, log_path, blocks, ascii);
    if (*bias) return cmd_bias_sim(common, estimators, ns, reps, threads);
    if (*nine) return cmd_ninebin(common, pmf_files, nine_ns, nine_reps, !no_builtins);
    if (*theory) return cmd_theory(common, deltas, thermal, squeezing, loss);
    if (*nist) return cmd_nist_export(common, input, sample_bits, suite);
    if (*self) {
      spdlog::set_level(spdlog::level::err);
      Output out(common.out);
      const std::uint64_t seed = common.seed.value_or(2019);
      return run_selftest(out.stream(), seed) ? kOk : kSelftestFailure;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
