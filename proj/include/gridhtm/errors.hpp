#pragma once

#include <stdexcept>
#include <string>

namespace gridhtm {

/// An operation's arguments violate its preconditions, e.g. mismatched widths.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter set or configuration file is invalid.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing a file failed. The message names the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Snapshot bytes are malformed or corrupted.
class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A snapshot was written by an engine version this build cannot read.
class UnsupportedVersionError : public SnapshotError {
 public:
  using SnapshotError::SnapshotError;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractError(what);
}

inline void require_config(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace detail
}  // namespace gridhtm
