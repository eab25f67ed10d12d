#pragma once

#include <stdexcept>
#include <string>

namespace varprec {

/// Model state became non-finite during time stepping.
class NumericalBlowup : public std::runtime_error {
public:
  NumericalBlowup(const std::string& what, long step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step_index(step) {}
  long step_index;
};

/// Mismatched field or vector dimensions.
class ShapeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Orthonormalization hit a (numerically) rank-deficient input.
class DegenerateOutput : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad magic/version in a binary file header.
class VersionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace varprec
