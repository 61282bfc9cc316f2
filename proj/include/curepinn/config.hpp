#pragma once

#include <string>
#include <vector>

#include "curepinn/physics.hpp"

namespace curepinn {

/// Parses a `key = value` configuration (dotted keys, `#` comments, blank
/// lines ignored) from a string. Accepts the unit-suffixed key variants
/// documented in the README (mm/m, min/s, C/K), normalizes everything to SI,
/// validates, and returns the config. Unknown or duplicate keys raise
/// ConfigError naming the offending key.
ProblemConfig parse_config_text(const std::string& text);

/// As parse_config_text but reads the file at `path`.
ProblemConfig load_config_file(const std::string& path);

/// Built-in named configurations (case1..case4 plus the case1a/case3a
/// conductivity variants). Throws ConfigError for unknown names.
ProblemConfig preset_config(const std::string& name);

/// Names accepted by preset_config, in canonical order.
std::vector<std::string> preset_names();

/// Canonical `key = value` serialization in SI units; parses back to an
/// identical config via parse_config_text.
std::string dump_config(const ProblemConfig& cfg);

/// FNV-1a 64-bit hash of the canonical serialization, as 16 hex digits.
/// Identical configs hash identically across runs and platforms.
std::string config_hash(const ProblemConfig& cfg);

}  // namespace curepinn
