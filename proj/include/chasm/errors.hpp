#pragma once

#include <stdexcept>
#include <string>

namespace chasm {

/// Invalid or inconsistent run/grid/closure configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A problem size outside what an operation supports (too small or guarded).
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised by multistep schemes that are stepped before their history exists.
class BootstrapRequired : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Junction exchange failure: a missing or mismatched neighbor message.
class ExchangeError : public std::runtime_error {
 public:
  ExchangeError(const std::string& what, unsigned junction)
      : std::runtime_error(what), junction_(junction) {}
  unsigned junction() const { return junction_; }

 private:
  unsigned junction_;
};

/// Non-finite or blown-up state detected during time stepping.
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, long step, double time)
      : std::runtime_error(what), step_(step), time_(time) {}
  long step() const { return step_; }
  double time() const { return time_; }

 private:
  long step_;
  double time_;
};

}  // namespace chasm
