#pragma once

#include <stdexcept>
#include <string>

namespace swarmtune {

/// Invalid configuration value or an unusable resource named by one.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Vector lengths disagree with the search space or model geometry.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A value lies outside the box bounds it was required to respect.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed file content (config syntax, image bytes, CSV rows).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Caller-supplied data violates the operation's preconditions.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Training reached a non-finite loss.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace swarmtune
