#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace routhe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point (or a finite-difference probe) left the chart's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class SingularJacobian : public Error {
 public:
  SingularJacobian(const std::string& what, double condition) : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// A trajectory step failed; carries the failing step index.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, std::size_t index) : Error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

class InvarianceViolation : public Error {
 public:
  using Error::Error;
};

class NoSolution : public Error {
 public:
  using Error::Error;
};

class InconsistentBeta : public Error {
 public:
  using Error::Error;
};

class NotBasic : public Error {
 public:
  using Error::Error;
};

class RequiresRouth : public Error {
 public:
  using Error::Error;
};

class RepresentativeOutOfChart : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace routhe
