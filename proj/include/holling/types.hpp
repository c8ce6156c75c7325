#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace holling {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

using Vec2 = Vector2<double>;
using Mat2 = Matrix2<double>;

/// A location in the phase plane. Components are always finite.
using PhasePoint = Vec2;
/// (dx/dt, dy/dt) at a point.
using FieldValue = Vec2;

inline bool is_finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

/// Wedge product x1*y2 - x2*y1.
template <typename Scalar>
Scalar wedge(const Vector2<Scalar>& a, const Vector2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Error hierarchy. Everything numerical derives from NumericalError so the CLI
// can map it to a single exit code.

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContourThroughSingularity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonIntegerWinding : public NumericalError {
 public:
  NonIntegerWinding(const std::string& what, double residual)
      : NumericalError(what), residual(residual) {}
  double residual;
};

class StepSizeUnderflow : public NumericalError {
 public:
  StepSizeUnderflow(const std::string& what, double t, const Vec2& last)
      : NumericalError(what), time(t), last_state(last) {}
  double time;
  Vec2 last_state;
};

class NoReturn : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoiseDominated : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InconclusiveAudit : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace holling
