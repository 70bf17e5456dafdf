#pragma once

#include <stdexcept>
#include <string>

namespace eepred {

// Domain failures (bad parameters, divergence, degenerate training data).
// The CLI maps these to exit code 2.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DivergenceError : public DomainError {
 public:
  DivergenceError(double blowup_time, double value)
      : DomainError("trajectory diverged at t=" + std::to_string(blowup_time) +
                    " (|x|=" + std::to_string(value) + ")"),
        blowup_time_(blowup_time) {}

  double blowup_time() const noexcept { return blowup_time_; }

 private:
  double blowup_time_;
};

class InsufficientPeaksError : public DomainError {
 public:
  explicit InsufficientPeaksError(std::size_t count)
      : DomainError("need at least 2 peaks for qualifier statistics, got " +
                    std::to_string(count)),
        count_(count) {}

  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

class DegenerateTrainingError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ConvergenceError : public DomainError {
 public:
  ConvergenceError(const std::string& what, double violation)
      : DomainError(what + " (final KKT violation " + std::to_string(violation) + ")"),
        violation_(violation) {}

  double violation() const noexcept { return violation_; }

 private:
  double violation_;
};

class GenerationError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Unreadable, missing or malformed artifacts. Exit code 3.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eepred
