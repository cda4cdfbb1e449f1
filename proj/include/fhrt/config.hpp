#pragma once

#include "fhrt/evolution.hpp"

#include <map>
#include <string>
#include <vector>

namespace fhrt {

/// Every problem found in a config file, one "line N: key: message" each.
class ConfigParseError : public ConfigError {
 public:
  explicit ConfigParseError(std::vector<std::string> issues);
  [[nodiscard]] const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

struct ParsedConfig {
  RunConfig run;
  /// key -> raw value text, for provenance in the run manifest
  std::map<std::string, std::string> entries;
};

/// Flat `key = value` text with `#` comments. Required: engine, n, N (torus)
/// or nodes (radial), L (torus) or R (radial), alpha, T. gamma defaults to
/// alpha; everything else to the RunConfig defaults.
ParsedConfig parse_config(const std::string& text);
ParsedConfig load_config(const std::string& path);

/// Keys accepted by parse_config.
const std::vector<std::string>& config_keys();

}  // namespace fhrt
