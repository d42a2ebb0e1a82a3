#pragma once

#include <stdexcept>
#include <string>

namespace nozzleflow {

/// Argument outside the mathematical domain of a function (vacuum bound,
/// non-positive density, point outside the nozzle, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested mass flux cannot be carried by a subsonic flow.
class InfeasibleFluxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be read or written; the message carries the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or incomplete run configuration. `key()` names the offending
/// entry, `line()` its line in the config file (0 for overrides/defaults).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& what)
      : std::runtime_error(format(key, line, what)), key_(std::move(key)), line_(line) {}

  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& what) {
    std::string msg = "config error";
    if (line > 0) msg += " (line " + std::to_string(line) + ")";
    if (!key.empty()) msg += " [" + key + "]";
    return msg + ": " + what;
  }

  std::string key_;
  int line_;
};

}  // namespace nozzleflow
