#pragma once

#include <stdexcept>
#include <string>

namespace curepinn {

/// Invalid configuration: bad key, missing field, violated physical constraint.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: divergence, non-finite values, singular systems.
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

/// Artifact mismatch: checkpoint incompatible with the requested architecture.
struct ArtifactError : std::runtime_error {
  explicit ArtifactError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace curepinn
