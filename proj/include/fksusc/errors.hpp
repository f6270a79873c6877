#pragma once

#include <stdexcept>
#include <string>

namespace fksusc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: configuration documents, bath tables, parameter ranges.
/// `key()` names the offending key (dotted path) or table row.
class InputError : public Error {
 public:
  InputError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// The ell = 0 (static) susceptibility component is not handled.
class StaticComponentError : public Error {
 public:
  StaticComponentError() : Error("static component (ell = 0) is not supported") {}
};

/// Numerical breakdown: singular propagators, singular linear systems,
/// non-convergent iterations, evaluation outside tabulated support.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularError : public NumericalError {
 public:
  SingularError(const std::string& what, int index)
      : NumericalError(what + " at m = " + std::to_string(index)), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

class IllConditionedError : public NumericalError {
 public:
  IllConditionedError(const std::string& what, double condition)
      : NumericalError(what + " (condition estimate " + std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : NumericalError(what + " after " + std::to_string(iterations) +
                       " iterations (residual " + std::to_string(residual) + ")"),
        residual_(residual),
        iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

class CoverageError : public NumericalError {
 public:
  CoverageError(const std::string& what, int index)
      : NumericalError(what + ": index " + std::to_string(index) + " outside tabulated range"),
        index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

}  // namespace fksusc
