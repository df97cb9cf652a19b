#pragma once

#include <stdexcept>
#include <string>

namespace boreal {

/// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The physics left its admissible region (solver failure, temperature outside
/// the sanity clamp). The message carries the offending state.
class PhysicsFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration: unknown key, malformed value, missing file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A persisted artifact (checkpoint, run record) could not be read.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw ContractViolation(what);
}

}  // namespace boreal
