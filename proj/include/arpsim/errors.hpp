#pragma once

#include <stdexcept>
#include <string>

namespace arpsim {

/// A physical or numerical parameter outside its domain.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested grating diffraction order does not propagate.
class EvanescentOrder : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Time integration produced a non-finite or unphysical state.
class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}

  /// Last grid time (ps) at which the state passed its checks.
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

/// The correlation-expansion state would exceed the configured memory cap.
class MemoryBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LookupError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::string path)
      : std::runtime_error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace arpsim
