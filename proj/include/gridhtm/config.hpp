#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "gridhtm/runner.hpp"
#include "gridhtm/synthetic.hpp"

namespace gridhtm {

struct ConfigValue {
  std::string text;
  /// Where the value came from, e.g. "run.cfg:12", for diagnostics.
  std::string origin;
};

/// Flat `section.key = value` settings.
using ConfigMap = std::map<std::string, ConfigValue, std::less<>>;

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// skipped. Throws ConfigError listing every malformed or duplicate line.
ConfigMap parse_config(std::string_view text, const std::string& source);
ConfigMap load_config(const std::filesystem::path& path);

/// Applies a `key=value` override, replacing any earlier value.
void set_config_value(ConfigMap& config, std::string_view assignment, const std::string& origin);

/// Builds a run configuration. Unknown keys and bad values are all
/// reported together in one ConfigError.
RunConfig make_run_config(const ConfigMap& config);

/// Builds a scenario from the `scenario.*` keys alone; other keys are
/// rejected.
Scenario make_scenario(const ConfigMap& config);

/// True when any key starts with `scenario.`.
bool has_scenario(const ConfigMap& config);

}  // namespace gridhtm
