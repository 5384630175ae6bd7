#pragma once

#include <stdexcept>
#include <string>

namespace stsmc {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-domain argument to a numeric primitive.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Invalid scenario or gain configuration. Carries the offending key and
/// source line when the error comes from a parsed document (line 0 = unknown).
class ConfigError : public Error {
 public:
  ConfigError(std::string key, int line, const std::string& what)
      : Error(format(key, line, what)), key_(std::move(key)), line_(line) {}
  explicit ConfigError(const std::string& what) : Error(what), line_(0) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& what) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += "'" + key + "': ";
    return out + what;
  }

  std::string key_;
  int line_;
};

/// Input file does not exist or cannot be opened.
class FileNotFoundError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing an artifact failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Errors raised while a scenario is running carry the simulated time.
class SimulationError : public Error {
 public:
  SimulationError(double time, const std::string& what)
      : Error("t=" + std::to_string(time) + " s: " + what), time_(time), detail_(what) {}
  double time() const noexcept { return time_; }
  /// Message without the time prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  double time_;
  std::string detail_;
};

/// Non-finite plant or estimator state.
class DivergenceError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/// Desired output voltage exceeds what the estimated load admits.
class ReferenceError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/// Power factor requested for a window whose current has zero RMS.
class PowerFactorError : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

}  // namespace stsmc
