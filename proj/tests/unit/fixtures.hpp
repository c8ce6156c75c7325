#pragma once

#include "holling/vectorfield.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace fixtures {

using holling::Mat2;
using holling::Vec2;

/// x' = rho x - y - x r^2, y' = x + rho y - y r^2. Stable cycle r = sqrt(rho),
/// period 2 pi, d'(s*) = exp(-4 pi rho) - 1.
struct HopfNormalForm final : holling::PlanarSystem {
  double rho = 1.0;

  explicit HopfNormalForm(double r = 1.0) : rho(r) {}

  Vec2 field(const Vec2& z) const override {
    const double r2 = z.squaredNorm();
    return {rho * z.x() - z.y() - z.x() * r2, z.x() + rho * z.y() - z.y() * r2};
  }
  Mat2 jacobian(const Vec2& z) const override {
    const double x = z.x(), y = z.y();
    Mat2 J;
    J << rho - 3 * x * x - y * y, -1 - 2 * x * y, 1 - 2 * x * y, rho - x * x - 3 * y * y;
    return J;
  }
  double parameter(std::string_view name) const override {
    if (name == "rho") return rho;
    throw std::invalid_argument("HopfNormalForm has no parameter " + std::string(name));
  }
  Vec2 parameter_derivative(std::string_view name, const Vec2& z) const override {
    parameter(name);
    return z;
  }
  std::unique_ptr<holling::PlanarSystem> with_parameter(std::string_view name,
                                                        double value) const override {
    parameter(name);
    return std::make_unique<HopfNormalForm>(value);
  }
};

/// x' = -y + x (r^2 - 1)^2 (radial part (r^2-1)^2): a semistable cycle of
/// multiplicity two at r = 1.
struct DoubleCycle final : holling::PlanarSystem {
  double eps = 0.0;

  explicit DoubleCycle(double e = 0.0) : eps(e) {}

  double radial(double r2) const { return (r2 - 1) * (r2 - 1) - eps; }
  Vec2 field(const Vec2& z) const override {
    const double g = radial(z.squaredNorm());
    return {-z.y() + z.x() * g, z.x() + z.y() * g};
  }
  Mat2 jacobian(const Vec2& z) const override {
    const double x = z.x(), y = z.y(), r2 = z.squaredNorm();
    const double g = radial(r2), dg = 2 * (r2 - 1);
    Mat2 J;
    J << g + 2 * x * x * dg, -1 + 2 * x * y * dg, 1 + 2 * x * y * dg, g + 2 * y * y * dg;
    return J;
  }
  double parameter(std::string_view name) const override {
    if (name == "eps") return eps;
    throw std::invalid_argument("DoubleCycle has no parameter " + std::string(name));
  }
  Vec2 parameter_derivative(std::string_view name, const Vec2& z) const override {
    parameter(name);
    return -z;
  }
  std::unique_ptr<holling::PlanarSystem> with_parameter(std::string_view name,
                                                        double value) const override {
    parameter(name);
    return std::make_unique<DoubleCycle>(value);
  }
};

}  // namespace fixtures
