#pragma once

#include <stdexcept>
#include <string>

namespace cyclicwave {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or precondition is outside its admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Adaptive time stepping could not continue (step-size underflow, step budget, non-finite state).
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double t) : Error(what), t_(t) {}
  double time() const noexcept { return t_; }

 private:
  double t_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double lo, double hi) : Error(what), lo_(lo), hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_, hi_;
};

class LinearSolveError : public Error {
 public:
  LinearSolveError(const std::string& what, double condition) : Error(what), condition_(condition) {}
  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};

/// A bounded search (λ sampling, M search) ran out of candidates.
class SearchExhaustedError : public Error {
 public:
  using Error::Error;
};

/// The requested construction does not apply (e.g. both transform endpoints are infinite).
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

/// A sampling grid does not resolve the field it carries.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

}  // namespace cyclicwave
