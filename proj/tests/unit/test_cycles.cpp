#include "fixtures.hpp"
#include "holling/continuation.hpp"
#include "holling/cycles.hpp"

#include <doctest.h>

#include <cmath>

using namespace holling;

namespace {

constexpr double kPi = 3.141592653589793;

CycleOptions symmetric_options() {
  CycleOptions o;
  o.box = Box::symmetric(10);
  return o;
}

// Field multiplied by a constant: same orbits, time rescaled.
struct Scaled final : PlanarSystem {
  const PlanarSystem& base;
  double k;
  Scaled(const PlanarSystem& b, double s) : base(b), k(s) {}
  Vec2 field(const Vec2& z) const override { return k * base.field(z); }
  Mat2 jacobian(const Vec2& z) const override { return k * base.jacobian(z); }
  double parameter(std::string_view n) const override { return base.parameter(n); }
  Vec2 parameter_derivative(std::string_view n, const Vec2& z) const override {
    return k * base.parameter_derivative(n, z);
  }
  std::unique_ptr<PlanarSystem> with_parameter(std::string_view, double) const override {
    throw std::logic_error("not needed");
  }
};

// Two-cycle parameters found by the scenario search (stage iii).
const SystemParams kTwoCycle(6.599754395434497, -3.0, 0.2, 0.5, 0.0);

}  // namespace

TEST_SUITE("cycles") {

TEST_CASE("Hopf fixture: displacement vanishes on the unit circle") {
  const fixtures::HopfNormalForm h(1.0);
  const Section sec(Vec2(1, 0), Vec2(1, 0));
  const CycleOptions o = symmetric_options();
  CHECK(std::abs(displacement(h, sec, 0.0, o)) < 1e-8);
  CHECK(displacement(h, sec, -0.3, o) > 0.0);
  CHECK(displacement(h, sec, 0.3, o) < 0.0);
  const auto prof = displacement_profile(h, sec, 0.1, 0.9, 9, o);
  for (const auto& [s, d] : prof.samples) CHECK(d < 0.0);
}

TEST_CASE("Hopf fixture: one stable cycle with the analytic multiplier") {
  const fixtures::HopfNormalForm h(1.0);
  const Section sec(Vec2(1, 0), Vec2(1, 0));
  const CycleOptions o = symmetric_options();
  const auto cs = locate_cycles(h, sec, -0.8, 1.0, 40, o);
  REQUIRE(cs.size() == 1);
  const LimitCycle& c = cs[0];
  CHECK(std::abs(c.s_star) < 1e-8);
  CHECK(c.stability == Stability::stable);
  CHECK(c.multiplicity_estimate == 1);
  CHECK(c.orientation == 1);
  CHECK(c.period == doctest::Approx(2 * kPi).epsilon(1e-8));
  CHECK(c.closure_error < 1e-7);
  const double exact = std::expm1(-4 * kPi);
  CHECK(std::abs(d_s_via_divergence(h, c) - exact) < 1e-6);
  const double e = 1e-4;
  const double fd = (displacement(h, sec, e, o) - displacement(h, sec, -e, o)) / (2 * e);
  CHECK(std::abs(d_s_via_divergence(h, c) - fd) < 1e-3 * std::abs(fd));
}

TEST_CASE("d_s is invariant under time rescaling") {
  const fixtures::HopfNormalForm h(1.0);
  const Scaled h2(h, 2.0);
  const Section sec(Vec2(1, 0), Vec2(1, 0));
  const CycleOptions o = symmetric_options();
  const LimitCycle c1 = make_cycle(h, sec, 0.0, o);
  const LimitCycle c2 = make_cycle(h2, sec, 0.0, o);
  CHECK(c2.period == doctest::Approx(0.5 * c1.period).epsilon(1e-8));
  CHECK(d_s_via_divergence(h2, c2) == doctest::Approx(d_s_via_divergence(h, c1)).epsilon(1e-6));
}

TEST_CASE("parameter derivative on the Hopf fixture") {
  for (double rho : {0.5, 1.0, 2.0}) {
    const fixtures::HopfNormalForm h(rho);
    const Section sec(Vec2(std::sqrt(rho), 0), Vec2(1, 0));
    const CycleOptions o = symmetric_options();
    const LimitCycle c = make_cycle(h, sec, 0.0, o);
    const double dmu = d_mu_via_wedge(h, c, "rho");
    const double exact = (1 - std::exp(-4 * kPi * rho)) / (2 * std::sqrt(rho));
    CHECK(dmu == doctest::Approx(exact).epsilon(1e-6));
    const double eps = 1e-5;
    const double fd = (displacement(*h.with_parameter("rho", rho + eps), sec, 0.0, o) -
                       displacement(*h.with_parameter("rho", rho - eps), sec, 0.0, o)) /
                      (2 * eps);
    CHECK(std::abs(dmu - fd) < 1e-2 * std::abs(fd));
  }
}

TEST_CASE("multiplicity of synthetic zeros") {
  CHECK(estimate_multiplicity([](double s) { return s; }, 0, 1e-12, 0.1).multiplicity == 1);
  CHECK(estimate_multiplicity([](double s) { return s * s; }, 0, 1e-12, 0.1).multiplicity == 2);
  const auto m3 = estimate_multiplicity([](double s) { return s * s * s; }, 0, 1e-12, 0.1);
  CHECK(m3.multiplicity == 3);
  CHECK(m3.capped);
  CHECK(estimate_multiplicity([](double s) { return s * s + 0.3 * s * s * s; }, 0, 1e-12, 0.1)
            .multiplicity == 2);
}

TEST_CASE("semistable cycle of multiplicity two") {
  const fixtures::DoubleCycle f(0.0);
  const Section sec(Vec2(0, 0), Vec2(1, 0), Section::Orientation::positive_crossing, 0.0);
  LimitCycle c = make_cycle(f, sec, 1.0, symmetric_options());
  const auto m = estimate_multiplicity(f, c, symmetric_options());
  CHECK(m.multiplicity == 2);
  CHECK(std::abs(d_s_via_divergence(f, c)) < 1e-9);
}

TEST_CASE("no cycles for alpha = beta = 0") {
  for (const SystemParams& p : {SystemParams(0, 0, 0.2, 0.5, 0), SystemParams(0, 0, 0.5, 0.3, 0.2),
                                SystemParams(0, 0, 0.05, 1.0, 0.01)}) {
    CountOptions co;
    co.n_scan = 400;
    for (const auto& nc : nested_cycles(p, co)) CHECK(nc.cycles.empty());
  }
}

TEST_CASE("two nested cycles in the two-cycle regime") {
  const auto counts = nested_cycles(kTwoCycle);
  REQUIRE(counts.size() == 1);
  const auto& cs = counts[0].cycles;
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].stability == Stability::unstable);
  CHECK(cs[1].stability == Stability::stable);
  CHECK(cs[0].s_star < cs[1].s_star);
  for (const auto& c : cs) {
    CHECK(winding_around(c, counts[0].anti_saddle) == 1);
    CHECK(c.closure_error < 1e-7);
    CHECK(c.multiplicity_estimate == 1);
  }
  CHECK(max_radius(cs[0], counts[0].anti_saddle) < max_radius(cs[1], counts[0].anti_saddle));
}

TEST_CASE("d_s and d_mu on a cycle of the quartic field match finite differences") {
  const auto counts = nested_cycles(kTwoCycle);
  REQUIRE(counts.size() == 1);
  const HollingSystem sys(kTwoCycle);
  CycleOptions o;
  for (const auto& c : counts[0].cycles) {
    const double e = 1e-5;
    const double fd_s = (displacement(sys, c.section, c.s_star + e, o) -
                         displacement(sys, c.section, c.s_star - e, o)) / (2 * e);
    CHECK(std::abs(c.d_s_value - fd_s) < 1e-3 * std::abs(fd_s));
    for (const char* w : {"alpha", "beta", "gamma", "delta"}) {
      const double v = sys.parameter(w);
      const double fd = (displacement(*sys.with_parameter(w, v + e), c.section, c.s_star, o) -
                         displacement(*sys.with_parameter(w, v - e), c.section, c.s_star, o)) / (2 * e);
      CAPTURE(w);
      CHECK(std::abs(d_mu_via_wedge(sys, c, w) - fd) < 1e-2 * std::abs(fd));
    }
    // Counterclockwise cycles move inward as gamma grows: f ^ f_gamma > 0.
    CHECK(c.orientation == 1);
    CHECK(d_mu_via_wedge(sys, c, "gamma") < 0.0);
  }
}

}
