#include "fixtures.hpp"
#include "holling/equilibria.hpp"
#include "holling/flow.hpp"

#include <doctest.h>

#include <cmath>

using namespace holling;

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Radius after one turn of the Hopf normal form (the angle advances at unit speed).
double hopf_return_radius(double rho, double r0) {
  return std::sqrt(rho / (1 + (rho / (r0 * r0) - 1) * std::exp(-2 * rho * kTwoPi)));
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("section rejects a zero direction") {
  CHECK_THROWS_AS(Section(Vec2(0, 0), Vec2(0, 0)), std::invalid_argument);
  const Section s(Vec2(1, 2), Vec2(0, 2));
  CHECK(s.direction().norm() == doctest::Approx(1.0));
  CHECK(s.coordinate(s.point(0.3)) == doctest::Approx(0.3));
}

TEST_CASE("return map of the Hopf normal form matches the radial solution") {
  const fixtures::HopfNormalForm h(0.5);
  const Section sec(Vec2(0, 0), Vec2(1, 0), Section::Orientation::positive_crossing, 0.0);
  const Box box = Box::symmetric(10);
  for (double r0 : {0.2, 0.5, std::sqrt(0.5), 1.0, 2.0}) {
    const ReturnResult rr = first_return(h, sec, r0, 50, box);
    CHECK(rr.s == doctest::Approx(hopf_return_radius(0.5, r0)).epsilon(1e-8));
    CHECK(rr.period == doctest::Approx(kTwoPi).epsilon(1e-8));
  }
}

TEST_CASE("return map is increasing on an annulus") {
  const fixtures::HopfNormalForm h(1.0);
  const Section sec(Vec2(0, 0), Vec2(1, 0), Section::Orientation::positive_crossing, 0.0);
  double prev = -1;
  for (int i = 1; i <= 40; ++i) {
    const double s = 0.05 * i;
    const double v = return_map(h, sec, s, 50, Box::symmetric(10));
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("return map of the quartic field is increasing around the anti-saddle") {
  const SystemParams p(6.6, -3, 0.2, 0.5, 0);
  const HollingSystem sys(p);
  Vec2 A(0, 0);
  for (const auto& e : find_finite(p))
    if (e.in_open_first_quadrant && e.is_anti_saddle()) A = e.location;
  REQUIRE(A.x() > 0);
  const Section sec(A, Vec2(0, 1), Section::Orientation::positive_crossing, 0.0);
  double prev = -1;
  for (int i = 1; i <= 30; ++i) {
    const double s = 0.05 * i;
    double v;
    try {
      v = return_map(sys, sec, s, 500, Box::first_quadrant());
    } catch (const NoReturn&) {
      continue;
    }
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("outcomes: convergence, escape, time limit") {
  const fixtures::HopfNormalForm stable_focus(-0.5);
  Orbit o = integrate(stable_focus, Vec2(0.3, 0), 500, Box::symmetric(10));
  CHECK(o.outcome == OrbitOutcome::converged_to_point);
  CHECK(o.last().norm() < 1e-6);

  const fixtures::HopfNormalForm h(1.0);
  o = integrate(h, Vec2(3, 0), -10, Box::symmetric(10));
  CHECK(o.outcome == OrbitOutcome::escaped_box);

  o = integrate(h, Vec2(1, 0), 3.0, Box::symmetric(10));
  CHECK(o.outcome == OrbitOutcome::max_time);
  CHECK(o.last().x() == doctest::Approx(std::cos(3.0)).epsilon(1e-8));
  CHECK(o.last().y() == doctest::Approx(std::sin(3.0)).epsilon(1e-8));
  for (std::size_t i = 1; i < o.samples.size(); ++i) CHECK(o.samples[i].t > o.samples[i - 1].t);
}

TEST_CASE("backward integration retraces the forward orbit") {
  const fixtures::HopfNormalForm h(0.3);
  const Vec2 z0(0.2, 0.1);
  const Orbit fwd = integrate(h, z0, 5.0, Box::symmetric(10));
  const Orbit back = integrate(h, fwd.last(), -5.0, Box::symmetric(10));
  CHECK((back.last() - z0).norm() < 1e-8);
}

TEST_CASE("crossing events respect the section orientation") {
  const fixtures::HopfNormalForm h(1.0);
  // Start moving upward; the downward crossing at (-1, 0) must be skipped.
  const Section xaxis(Vec2(0, 0), Vec2(1, 0));
  const Orbit o = integrate(h, Vec2(0.6, 0.8), 20, Box::symmetric(10), xaxis);
  REQUIRE(o.outcome == OrbitOutcome::crossed_section);
  CHECK(o.events.back().s == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(o.events.back().t == doctest::Approx(kTwoPi - std::atan2(0.8, 0.6)).epsilon(1e-8));
}

TEST_CASE("fixed-duration quadrature of an augmented state") {
  const Eigen::Vector2d y = integrate_fixed<2>(
      [](const Eigen::Vector2d& s) { return Eigen::Vector2d(s[0], 1.0); }, Eigen::Vector2d(1, 0), 1.0);
  CHECK(y[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
  CHECK(y[1] == doctest::Approx(1.0).epsilon(1e-12));
}

}
