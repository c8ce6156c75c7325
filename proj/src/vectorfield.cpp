#include "holling/vectorfield.hpp"

#include <sstream>
#include <stdexcept>

namespace holling {

std::string_view to_string(Parameter p) {
  switch (p) {
    case Parameter::alpha: return "alpha";
    case Parameter::beta: return "beta";
    case Parameter::gamma: return "gamma";
    case Parameter::delta: return "delta";
    case Parameter::lambda: return "lambda";
    case Parameter::mu: return "mu";
  }
  return "?";
}

Parameter parse_parameter(std::string_view name) {
  for (auto p : {Parameter::alpha, Parameter::beta, Parameter::gamma, Parameter::delta,
                 Parameter::lambda, Parameter::mu}) {
    if (to_string(p) == name) return p;
  }
  throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

namespace {

void require(bool ok, const char* field, double value, const char* bound) {
  if (ok) return;
  std::ostringstream msg;
  msg << "invalid parameter " << field << " = " << value << ": must be " << bound;
  throw std::invalid_argument(msg.str());
}

}  // namespace

SystemParams::SystemParams(double alpha, double beta, double delta, double lambda, double mu,
                           double gamma)
    : alpha_(alpha), beta_(beta), delta_(delta), lambda_(lambda), mu_(mu), gamma_(gamma) {
  require(std::isfinite(alpha) && alpha >= 0.0, "alpha", alpha, ">= 0");
  require(std::isfinite(beta), "beta", beta, "finite");
  require(std::isfinite(delta) && delta > 0.0, "delta", delta, "> 0");
  require(std::isfinite(lambda) && lambda > 0.0, "lambda", lambda, "> 0");
  require(std::isfinite(mu) && mu >= 0.0, "mu", mu, ">= 0");
  require(std::isfinite(gamma), "gamma", gamma, "finite");
}

double SystemParams::get(Parameter p) const {
  switch (p) {
    case Parameter::alpha: return alpha_;
    case Parameter::beta: return beta_;
    case Parameter::gamma: return gamma_;
    case Parameter::delta: return delta_;
    case Parameter::lambda: return lambda_;
    case Parameter::mu: return mu_;
  }
  return 0.0;
}

SystemParams SystemParams::with(Parameter p, double value) const {
  double a = alpha_, b = beta_, d = delta_, l = lambda_, m = mu_, g = gamma_;
  switch (p) {
    case Parameter::alpha: a = value; break;
    case Parameter::beta: b = value; break;
    case Parameter::gamma: g = value; break;
    case Parameter::delta: d = value; break;
    case Parameter::lambda: l = value; break;
    case Parameter::mu: m = value; break;
  }
  return SystemParams(a, b, d, l, m, g);
}

double rotation_determinant(const SystemParams& p, const PhasePoint& pt, RotationParameter which) {
  if (which == RotationParameter::gamma) {
    return wedge(eval_field(p, pt), parameter_derivative(p, pt, Parameter::gamma));
  }
  const SystemParams base = p.unrotated();
  const Parameter w = which == RotationParameter::alpha ? Parameter::alpha : Parameter::beta;
  return wedge(eval_field(base, pt), parameter_derivative(base, pt, w));
}

Vec2 eval_rational(const SystemParams& p, const PhasePoint& pt) {
  const double x = pt.x(), y = pt.y();
  const double D = response_denominator(p, x);
  return {x * (1.0 - p.lambda() * x - x * y / D), -y * (p.delta() + p.mu() * y - x * x / D)};
}

double HollingSystem::parameter(std::string_view name) const {
  return params_.get(parse_parameter(name));
}

Vec2 HollingSystem::parameter_derivative(std::string_view name, const Vec2& z) const {
  return holling::parameter_derivative(params_, z, parse_parameter(name));
}

std::unique_ptr<PlanarSystem> HollingSystem::with_parameter(std::string_view name,
                                                            double value) const {
  return std::make_unique<HollingSystem>(params_.with(parse_parameter(name), value));
}

}  // namespace holling
