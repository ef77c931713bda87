#include "siqrng/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "siqrng/error.hpp"

namespace siqrng {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::pair<std::string, std::string> split_assignment(std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(line) + "'");
  const auto key = trim(line.substr(0, eq));
  if (key.empty()) throw ConfigError("empty key in '" + std::string(line) + "'");
  return {std::string(key), std::string(trim(line.substr(eq + 1)))};
}

double to_double(std::string_view key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(key) + ": not a number: '" + v + "'");
}

template <class Int>
Int to_int(std::string_view key, const std::string& v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": not a valid integer: '" + v + "'");
  }
  return out;
}

bool to_bool(std::string_view key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError(std::string(key) + ": expected a boolean, got '" + v + "'");
}

}  // namespace

ConfigMap parse_config(std::istream& in) {
  ConfigMap out;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    auto [k, v] = split_assignment(view);
    out[std::move(k)] = std::move(v);
  }
  return out;
}

ConfigMap load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

void apply_override(ConfigMap& config, std::string_view assignment) {
  auto [k, v] = split_assignment(assignment);
  config[std::move(k)] = std::move(v);
}

const std::vector<std::string_view>& known_config_keys() {
  static const std::vector<std::string_view> keys = {
      "source.kind",          "source.squeezing_db",      "source.loss",
      "source.variance",      "source.v_check",           "source.v_data",
      "detector.dark_var",    "detector.shot_var",        "detector.range",
      "detector.bin_width",   "detector.seed",            "protocol.n",
      "protocol.m",           "protocol.check_probability", "protocol.blocks",
      "protocol.calibration_samples", "protocol.subtract_mean", "protocol.max_consecutive_aborts",
      "protocol.reservoir_bits", "security.epsilon",      "estimator.kind",
      "estimator.failure_rate", "estimator.concentration", "estimator.posterior_draws",
      "estimator.bootstrap_resamples", "estimator.variance", "bound.constant",
      "extractor.l_max",      "extractor.seed_mode",      "extractor.seed_file",
      "seed",
  };
  return keys;
}

RunSettings settings_from(const ConfigMap& config) {
  const auto& keys = known_config_keys();
  for (const auto& [k, v] : config) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("unknown config key: " + k);
  }
  auto get = [&](std::string_view key) -> const std::string* {
    const auto it = config.find(key);
    return it == config.end() ? nullptr : &it->second;
  };
  auto num = [&](std::string_view key, double fallback) {
    const auto* v = get(key);
    return v ? to_double(key, *v) : fallback;
  };

  RunSettings s;
  ProtocolConfig& p = s.protocol;

  // Source.
  const std::string kind = get("source.kind") ? *get("source.kind") : "vacuum";
  try {
    switch (source_kind_from_string(kind)) {
      case SourceKind::vacuum: p.source = SourceModel::vacuum(); break;
      case SourceKind::thermal: p.source = SourceModel::thermal(num("source.variance", 1.0)); break;
      case SourceKind::squeezed:
        p.source = SourceModel::squeezed(num("source.squeezing_db", 0.0), num("source.loss", 0.0));
        break;
      case SourceKind::custom: {
        const double v = num("source.variance", 1.0);
        p.source = SourceModel::custom(num("source.v_check", v), num("source.v_data", v));
        break;
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("source: ") + e.what());
  }

  // Detector.
  p.detector.dark_var = num("detector.dark_var", p.detector.dark_var);
  p.detector.shot_var = num("detector.shot_var", p.detector.shot_var);
  if (const auto* v = get("detector.seed")) p.detector.seed = to_int<std::uint64_t>("detector.seed", *v);

  // Protocol sizes come before the range default, which depends on m.
  if (const auto* v = get("protocol.n")) p.n = to_int<std::size_t>("protocol.n", *v);
  if (const auto* v = get("protocol.m")) p.m = to_int<int>("protocol.m", *v);
  if (const auto* v = get("detector.bin_width")) p.bin_width = to_double("detector.bin_width", *v);
  if (const auto* v = get("detector.range")) {
    p.detector.range = to_double("detector.range", *v);
  } else {
    // Keep the default SNU bin width for the configured m and shot noise.
    const double bw = p.bin_width.value_or(ProtocolConfig::kDefaultDelta *
                                           std::sqrt(std::max(p.detector.shot_var - p.detector.dark_var, 0.0)));
    p.detector.range = bw * p.m / 2.0;
  }
  p.check_probability = num("protocol.check_probability", p.check_probability);
  if (const auto* v = get("protocol.blocks")) s.blocks = to_int<std::size_t>("protocol.blocks", *v);
  if (const auto* v = get("protocol.calibration_samples")) {
    p.calibration_samples = to_int<std::size_t>("protocol.calibration_samples", *v);
  }
  if (const auto* v = get("protocol.subtract_mean")) p.subtract_mean = to_bool("protocol.subtract_mean", *v);
  if (const auto* v = get("protocol.max_consecutive_aborts")) {
    p.max_consecutive_aborts = to_int<int>("protocol.max_consecutive_aborts", *v);
  }
  if (const auto* v = get("protocol.reservoir_bits")) {
    p.reservoir_capacity = to_int<std::size_t>("protocol.reservoir_bits", *v);
  }
  p.epsilon = num("security.epsilon", p.epsilon);

  // Estimator.
  if (const auto* v = get("estimator.kind")) {
    try {
      p.estimator = estimator_from_string(*v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  p.failure_rate = num("estimator.failure_rate", p.failure_rate);
  p.confidence.concentration = num("estimator.concentration", p.confidence.concentration);
  if (const auto* v = get("estimator.posterior_draws")) {
    p.confidence.posterior_draws = to_int<std::size_t>("estimator.posterior_draws", *v);
  }
  if (const auto* v = get("estimator.bootstrap_resamples")) {
    p.confidence.bootstrap_resamples = to_int<std::size_t>("estimator.bootstrap_resamples", *v);
  }
  if (const auto* v = get("estimator.variance")) {
    if (*v == "raw") {
      p.evb_variance = VarianceSource::raw_samples;
    } else if (*v == "bin_center") {
      p.evb_variance = VarianceSource::bin_centers;
    } else {
      throw ConfigError("estimator.variance: expected raw or bin_center");
    }
  }
  if (const auto* v = get("bound.constant")) {
    if (*v == "precise") {
      p.constant = ConstantMode::precise;
    } else if (*v == "leading_order") {
      p.constant = ConstantMode::leading_order;
    } else {
      throw ConfigError("bound.constant: expected precise or leading_order");
    }
  }

  // Extractor.
  if (const auto* v = get("extractor.l_max")) p.l_max = to_int<std::size_t>("extractor.l_max", *v);
  if (const auto* v = get("extractor.seed_mode")) {
    if (*v == "reuse") {
      p.seed_mode = SeedSchedule::Mode::reuse;
    } else if (*v == "fresh") {
      p.seed_mode = SeedSchedule::Mode::fresh;
    } else {
      throw ConfigError("extractor.seed_mode: expected reuse or fresh");
    }
  }
  if (const auto* v = get("extractor.seed_file")) p.seed_file = *v;
  if (const auto* v = get("seed")) p.master_seed = to_int<std::uint64_t>("seed", *v);

  if (s.blocks == 0) throw ConfigError("protocol.blocks must be positive");
  p.validate();
  return s;
}

ConfigMap to_config_map(const RunSettings& settings) {
  const ProtocolConfig& p = settings.protocol;
  auto str = [](auto v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  ConfigMap m;
  m["source.kind"] = std::string(to_string(p.source.kind));
  if (p.source.kind == SourceKind::squeezed) {
    m["source.squeezing_db"] = str(p.source.squeezing_db);
    m["source.loss"] = str(p.source.loss);
  } else if (p.source.kind == SourceKind::thermal) {
    m["source.variance"] = str(p.source.v_check);
  } else if (p.source.kind == SourceKind::custom) {
    m["source.v_check"] = str(p.source.v_check);
    m["source.v_data"] = str(p.source.v_data);
  }
  m["detector.dark_var"] = str(p.detector.dark_var);
  m["detector.shot_var"] = str(p.detector.shot_var);
  m["detector.range"] = str(p.detector.range);
  if (p.bin_width) m["detector.bin_width"] = str(*p.bin_width);
  m["detector.seed"] = str(p.detector.seed);
  m["protocol.n"] = str(p.n);
  m["protocol.m"] = str(p.m);
  m["protocol.check_probability"] = str(p.check_probability);
  m["protocol.blocks"] = str(settings.blocks);
  m["security.epsilon"] = str(p.epsilon);
  m["estimator.kind"] = std::string(to_string(p.estimator));
  m["estimator.failure_rate"] = str(p.failure_rate);
  m["extractor.seed_mode"] = p.seed_mode == SeedSchedule::Mode::reuse ? "reuse" : "fresh";
  m["seed"] = str(p.master_seed);
  return m;
}

}  // namespace siqrng
