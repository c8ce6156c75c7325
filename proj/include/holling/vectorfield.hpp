#pragma once

#include "holling/types.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace holling {

enum class Parameter { alpha, beta, gamma, delta, lambda, mu };

std::string_view to_string(Parameter p);
/// Throws std::invalid_argument for unknown names.
Parameter parse_parameter(std::string_view name);

/// Model parameters of the quartic predator-prey field plus the rotation
/// parameter gamma. Constraints: alpha >= 0, delta > 0, lambda > 0, mu >= 0.
/// Construction throws std::invalid_argument naming the offending field.
class SystemParams {
 public:
  SystemParams(double alpha, double beta, double delta, double lambda, double mu,
               double gamma = 0.0);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double delta() const { return delta_; }
  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  double gamma() const { return gamma_; }

  double get(Parameter p) const;
  /// Copy with one parameter replaced (validated).
  SystemParams with(Parameter p, double value) const;
  SystemParams unrotated() const { return with(Parameter::gamma, 0.0); }

  bool operator==(const SystemParams&) const = default;

 private:
  double alpha_, beta_, delta_, lambda_, mu_, gamma_;
};

/// alpha*x^2 + beta*x + 1
template <typename Scalar>
Scalar response_denominator(const SystemParams& p, const Scalar& x) {
  return (Scalar(p.alpha()) * x + Scalar(p.beta())) * x + Scalar(1);
}

/// (P, Q) of the gamma = 0 quartic system in expanded polynomial form.
template <typename Scalar>
Vector2<Scalar> eval_unrotated(const SystemParams& p, const Vector2<Scalar>& pt) {
  const Scalar x = pt.x(), y = pt.y();
  const Scalar D = response_denominator(p, x);
  const Scalar P = x * ((Scalar(1) - Scalar(p.lambda()) * x) * D - x * y);
  const Scalar Q = -y * ((Scalar(p.delta()) + Scalar(p.mu()) * y) * D - x * x);
  return {P, Q};
}

/// The gamma-rotated field (P - gamma Q, Q + gamma P). gamma = 0 gives (P, Q).
template <typename Scalar>
Vector2<Scalar> eval_field(const SystemParams& p, const Vector2<Scalar>& pt) {
  const Vector2<Scalar> pq = eval_unrotated(p, pt);
  if (p.gamma() == 0.0) return pq;
  const Scalar g(p.gamma());
  return {pq.x() - g * pq.y(), pq.y() + g * pq.x()};
}

template <typename Scalar>
Matrix2<Scalar> eval_unrotated_jacobian(const SystemParams& p, const Vector2<Scalar>& pt) {
  const Scalar x = pt.x(), y = pt.y();
  const Scalar lam(p.lambda()), del(p.delta()), mu(p.mu());
  const Scalar D = response_denominator(p, x);
  const Scalar dD = Scalar(2 * p.alpha()) * x + Scalar(p.beta());
  const Scalar g = (Scalar(1) - lam * x) * D - x * y;
  const Scalar k = (del + mu * y) * D - x * x;
  Matrix2<Scalar> J;
  J(0, 0) = g + x * (-lam * D + (Scalar(1) - lam * x) * dD - y);
  J(0, 1) = -x * x;
  J(1, 0) = -y * ((del + mu * y) * dD - Scalar(2) * x);
  J(1, 1) = -k - y * mu * D;
  return J;
}

/// The rotation matrix [[1, -gamma], [gamma, 1]] that maps (P, Q) to the rotated field.
template <typename Scalar>
Matrix2<Scalar> rotation_matrix(const SystemParams& p) {
  const Scalar g(p.gamma());
  Matrix2<Scalar> M;
  M << Scalar(1), -g, g, Scalar(1);
  return M;
}

/// Exact Jacobian of the rotated field.
template <typename Scalar>
Matrix2<Scalar> eval_jacobian(const SystemParams& p, const Vector2<Scalar>& pt) {
  return rotation_matrix<Scalar>(p) * eval_unrotated_jacobian(p, pt);
}

/// Analytic derivative of the rotated field with respect to one parameter.
template <typename Scalar>
Vector2<Scalar> parameter_derivative(const SystemParams& p, const Vector2<Scalar>& pt,
                                     Parameter which) {
  const Scalar x = pt.x(), y = pt.y();
  const Scalar lam(p.lambda()), del(p.delta()), mu(p.mu());
  const Scalar D = response_denominator(p, x);
  Vector2<Scalar> d;
  switch (which) {
    case Parameter::gamma: {
      const Vector2<Scalar> pq = eval_unrotated(p, pt);
      return {-pq.y(), pq.x()};
    }
    case Parameter::alpha:
      d << x * (Scalar(1) - lam * x) * x * x, -y * (del + mu * y) * x * x;
      break;
    case Parameter::beta:
      d << x * (Scalar(1) - lam * x) * x, -y * (del + mu * y) * x;
      break;
    case Parameter::delta:
      d << Scalar(0), -y * D;
      break;
    case Parameter::lambda:
      d << -x * x * D, Scalar(0);
      break;
    case Parameter::mu:
      d << Scalar(0), -y * y * D;
      break;
  }
  return rotation_matrix<Scalar>(p) * d;
}

/// y(delta + mu y) - x(1 - lambda x). Zero set is the curve separating the
/// regions where increasing alpha or beta rotates the field one way or the other.
template <typename Scalar>
Scalar ellipse_residual(const SystemParams& p, const Vector2<Scalar>& pt) {
  const Scalar x = pt.x(), y = pt.y();
  return y * (Scalar(p.delta()) + Scalar(p.mu()) * y) - x * (Scalar(1) - Scalar(p.lambda()) * x);
}

enum class RotationParameter { alpha, beta, gamma };

/// Field-rotation determinant f ^ f_w. For alpha and beta this is computed on
/// the gamma = 0 field as P Q_w - Q P_w; for gamma on the rotated field, where
/// it reduces to P^2 + Q^2.
double rotation_determinant(const SystemParams& p, const PhasePoint& pt, RotationParameter which);

/// Rational (unscaled-time) form of the model. The quartic field equals this
/// times alpha x^2 + beta x + 1. Only defined where that factor is nonzero.
Vec2 eval_rational(const SystemParams& p, const PhasePoint& pt);

/// Autonomous planar vector field with named parameters. The flow, cycle and
/// continuation code is written against this interface so that test fixtures
/// (e.g. the Hopf normal form) can be plugged in.
class PlanarSystem {
 public:
  virtual ~PlanarSystem() = default;

  virtual Vec2 field(const Vec2& z) const = 0;
  virtual Mat2 jacobian(const Vec2& z) const = 0;
  double divergence(const Vec2& z) const { return jacobian(z).trace(); }

  /// Throws std::invalid_argument for names the system does not have.
  virtual double parameter(std::string_view name) const = 0;
  virtual Vec2 parameter_derivative(std::string_view name, const Vec2& z) const = 0;
  virtual std::unique_ptr<PlanarSystem> with_parameter(std::string_view name,
                                                       double value) const = 0;
  /// Characteristic coordinate scale, used for relative tolerances.
  virtual double scale() const { return 1.0; }
};

class HollingSystem final : public PlanarSystem {
 public:
  explicit HollingSystem(SystemParams params) : params_(params) {}

  const SystemParams& params() const { return params_; }

  Vec2 field(const Vec2& z) const override { return eval_field(params_, z); }
  Mat2 jacobian(const Vec2& z) const override { return eval_jacobian(params_, z); }
  double parameter(std::string_view name) const override;
  Vec2 parameter_derivative(std::string_view name, const Vec2& z) const override;
  std::unique_ptr<PlanarSystem> with_parameter(std::string_view name,
                                               double value) const override;

 private:
  SystemParams params_;
};

}  // namespace holling
