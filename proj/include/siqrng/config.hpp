#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "siqrng/protocol.hpp"

namespace siqrng {

using ConfigMap = std::map<std::string, std::string, std::less<>>;

/// key = value lines; '#' starts a comment; blank lines ignored. Later keys win.
ConfigMap parse_config(std::istream& in);
ConfigMap load_config_file(const std::filesystem::path& path);

/// Applies one "key=value" override.
void apply_override(ConfigMap& config, std::string_view assignment);

/// Every key this program understands, in documentation order.
const std::vector<std::string_view>& known_config_keys();

struct RunSettings {
  ProtocolConfig protocol;
  std::size_t blocks = 100;
};

/// Builds and validates a run configuration. Unknown keys and unparsable values
/// throw ConfigError.
RunSettings settings_from(const ConfigMap& config);

/// Inverse of settings_from for the keys that have a value (for logging).
ConfigMap to_config_map(const RunSettings& settings);

}  // namespace siqrng
