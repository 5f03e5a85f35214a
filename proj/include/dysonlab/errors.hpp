#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace dysonlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (|theta| >= sqrt(2),
/// non-finite input, empty window, out-of-regime asymptotics, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A Palm kernel was requested at a point where the base diagonal is not
/// strictly positive.
class ConditioningPointError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Iterative numerics that did not converge (eigensolver sweeps, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature ran out of refinement budget.
class QuadratureError : public NumericError {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : NumericError(what + " (achieved error estimate " +
                     std::to_string(achieved_error) + ")"),
        achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// Two particles share a coordinate, so the interaction drift is undefined.
class CollisionError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The SDE integrator exhausted its step-halving budget.
class StepFailure : public NumericError {
 public:
  StepFailure(const std::string& what, double time, Eigen::VectorXd state)
      : NumericError(what), time_(time), state_(std::move(state)) {}

  double time() const noexcept { return time_; }
  const Eigen::VectorXd& state() const noexcept { return state_; }

 private:
  double time_;
  Eigen::VectorXd state_;
};

}  // namespace dysonlab
