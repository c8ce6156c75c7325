#include "holling/vectorfield.hpp"

#include <doctest.h>

#include <random>

using namespace holling;

namespace {

SystemParams random_params(std::mt19937_64& rng, bool rotated) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return SystemParams(3 * u(rng), -4 + 6 * u(rng), 0.05 + u(rng), 0.1 + u(rng), 0.5 * u(rng),
                      rotated ? -1 + 2 * u(rng) : 0.0);
}

Vec2 random_point(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng)};
}

}  // namespace

TEST_SUITE("vectorfield") {

TEST_CASE("parameter validation names the field") {
  CHECK_THROWS_WITH_AS(SystemParams(-1, 0, 1, 1, 1), doctest::Contains("alpha"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(SystemParams(0, 0, 0, 1, 1), doctest::Contains("delta"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(SystemParams(0, 0, 1, -2, 1), doctest::Contains("lambda"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(SystemParams(0, 0, 1, 1, -1e-3), doctest::Contains("mu"), std::invalid_argument);
  CHECK_NOTHROW(SystemParams(0, -3, 0.2, 0.5, 0));
  CHECK(parse_parameter("lambda") == Parameter::lambda);
  CHECK_THROWS_AS(parse_parameter("nu"), std::invalid_argument);
}

TEST_CASE("field at a hand-computed point") {
  const SystemParams p(1, 1, 1, 1, 1);
  // D(1) = 3, P = 1*((0)*3 - 1) = -1, Q = -1*((2)*3 - 1) = -5
  const Vec2 f = eval_field(p, Vec2(1, 1));
  CHECK(f.x() == doctest::Approx(-1.0));
  CHECK(f.y() == doctest::Approx(-5.0));
}

TEST_CASE("axes are invariant") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const SystemParams p = random_params(rng, false);
    const Vec2 z = random_point(rng, -5, 5);
    CHECK(eval_field(p, Vec2(0.0, z.y())).x() == 0.0);
    CHECK(eval_field(p, Vec2(z.x(), 0.0)).y() == 0.0);
  }
}

TEST_CASE("analytic Jacobian matches central differences") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    const SystemParams p = random_params(rng, true);
    const Vec2 z = random_point(rng, -2, 3);
    const Mat2 J = eval_jacobian(p, z);
    for (int k = 0; k < 2; ++k) {
      const double h = 1e-6 * (1 + std::abs(z[k]));
      Vec2 zp = z, zm = z;
      zp[k] += h;
      zm[k] -= h;
      const Vec2 col = (eval_field(p, zp) - eval_field(p, zm)) / (2 * h);
      CHECK((col - J.col(k)).norm() <= 1e-6 * (1 + J.col(k).norm()));
    }
  }
}

TEST_CASE("parameter derivatives match central differences") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const SystemParams p = random_params(rng, true).with(Parameter::alpha, 1.5).with(Parameter::mu, 0.3);
    const Vec2 z = random_point(rng, 0, 3);
    for (auto w : {Parameter::alpha, Parameter::beta, Parameter::gamma, Parameter::delta,
                   Parameter::lambda, Parameter::mu}) {
      const double h = 1e-6;
      const Vec2 fd = (eval_field(p.with(w, p.get(w) + h), z) - eval_field(p.with(w, p.get(w) - h), z)) / (2 * h);
      const Vec2 an = parameter_derivative(p, z, w);
      CHECK((fd - an).norm() <= 1e-6 * (1 + an.norm()));
    }
  }
}

TEST_CASE("rotated Jacobian is the rotation matrix times the unrotated one") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 20; ++i) {
    const SystemParams p = random_params(rng, true);
    const Vec2 z = random_point(rng, -1, 2);
    Mat2 M;
    M << 1, -p.gamma(), p.gamma(), 1;
    CHECK((eval_jacobian(p, z) - M * eval_unrotated_jacobian(p.unrotated(), z)).norm() <= 1e-12 * (1 + eval_jacobian(p, z).norm()));
  }
}

TEST_CASE("rational form times the response denominator is the quartic field") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 50; ++i) {
    const SystemParams p = random_params(rng, false);
    const Vec2 z = random_point(rng, 0, 3);
    const double D = response_denominator(p, z.x());
    if (std::abs(D) < 1e-3) continue;
    CHECK((eval_rational(p, z) * D - eval_field(p, z)).norm() <= 1e-10 * (1 + eval_field(p, z).norm()));
  }
}

TEST_CASE("rotation determinants at a hand-computed point") {
  const SystemParams p(1, 1, 1, 1, 1);
  CHECK(rotation_determinant(p, Vec2(1, 1), RotationParameter::alpha) == doctest::Approx(2.0));
  CHECK(rotation_determinant(p, Vec2(1, 1), RotationParameter::beta) == doctest::Approx(2.0));
  CHECK(rotation_determinant(p, Vec2(1, 1), RotationParameter::gamma) == doctest::Approx(26.0));
  CHECK(ellipse_residual(p, Vec2(1, 1)) == doctest::Approx(2.0));
}

TEST_CASE("alpha determinant equals x^4 y times the ellipse residual") {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 1000; ++i) {
    const SystemParams p = random_params(rng, true);
    const Vec2 z = random_point(rng, -3, 3);
    const double x = z.x(), y = z.y();
    const double E = y * (p.delta() + p.mu() * y) - x * (1 - p.lambda() * x);
    const double want = x * x * x * x * y * E;
    const double got = rotation_determinant(p, z, RotationParameter::alpha);
    CHECK(std::abs(got - want) <= 1e-12 * std::max(std::abs(want), 1e-300) + 1e-300);
    // beta carries one power of x less
    const double gb = rotation_determinant(p, z, RotationParameter::beta);
    CHECK(std::abs(x * gb - got) <= 1e-12 * std::abs(got) + 1e-300);
  }
}

TEST_CASE("alpha and beta determinants share the ellipse sign in the open first quadrant") {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 1000; ++i) {
    const SystemParams p = random_params(rng, false);
    const Vec2 z = random_point(rng, 1e-3, 4);
    const double e = ellipse_residual(p, z);
    if (e == 0.0) continue;
    CHECK((rotation_determinant(p, z, RotationParameter::alpha) > 0) == (e > 0));
    CHECK((rotation_determinant(p, z, RotationParameter::beta) > 0) == (e > 0));
  }
}

TEST_CASE("gamma determinant is P^2 + Q^2") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const SystemParams p = random_params(rng, true);
    const Vec2 z = random_point(rng, -3, 3);
    const Vec2 pq = eval_unrotated(p.unrotated(), z);
    const double d = rotation_determinant(p, z, RotationParameter::gamma);
    CHECK(d >= 0.0);
    CHECK(d == doctest::Approx(pq.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("ellipse residual vanishes on the curve") {
  const SystemParams p(0.5, -1, 0.3, 0.7, 0.2);
  for (double x : {0.1, 0.5, 1.0, 1.3}) {
    const double c = -x * (1 - p.lambda() * x);
    const double y = (-p.delta() + std::sqrt(p.delta() * p.delta() - 4 * p.mu() * c)) / (2 * p.mu());
    CHECK(std::abs(ellipse_residual(p, Vec2(x, y))) < 1e-14);
  }
}

TEST_CASE("HollingSystem forwards parameters") {
  const HollingSystem h(SystemParams(1, 2, 0.3, 0.4, 0.5, 0.1));
  CHECK(h.parameter("beta") == 2.0);
  CHECK(h.with_parameter("mu", 0.25)->parameter("mu") == 0.25);
  CHECK_THROWS_AS(h.parameter("rho"), std::invalid_argument);
  const Vec2 z(0.7, 1.1);
  CHECK(h.divergence(z) == doctest::Approx(eval_jacobian(h.params(), z).trace()));
}

}
