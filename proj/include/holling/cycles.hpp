#pragma once

#include "holling/flow.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace holling {

enum class Stability { stable, unstable, semistable, undetermined };
std::string_view to_string(Stability s);

/// Options shared by the displacement-based searches.
struct CycleOptions {
  FlowOptions flow{};
  Box box = Box::first_quadrant();
  double max_period = 500.0;
  /// Sign-change roots are refined until |d| < root_tol.
  double root_tol = 1e-9;
  /// Local minima of |d| below this are treated as tangential zeros.
  double tangent_tol = 1e-7;
  /// |d_s| below this counts as nonhyperbolic.
  double hyperbolic_tol = 1e-6;
  bool estimate_multiplicity = true;
  bool compute_d_s = true;
};

struct LimitCycle {
  /// Section the cycle was located on and its coordinate there.
  Section section{Vec2::Zero(), Vec2::UnitX()};
  double s_star = 0.0;
  double period = 0.0;
  /// One period starting and ending at section.point(s_star).
  std::vector<OrbitSample> orbit_samples;
  Stability stability = Stability::undetermined;
  double d_s_value = 0.0;
  int multiplicity_estimate = 1;
  /// True when the estimate was capped at 3.
  bool multiplicity_capped = false;
  /// +1 counterclockwise, -1 clockwise.
  int orientation = 1;
  /// Normal line through the orbit point of largest |f|, directed outward;
  /// the cycle sits at coordinate 0.
  Section normal_section{Vec2::Zero(), Vec2::UnitX()};
  double closure_error = 0.0;

  Vec2 point() const { return section.point(s_star); }
};

struct DisplacementProfile {
  Section section;
  std::vector<std::pair<double, double>> samples;             // (s, d(s)); NaN = no return
  std::vector<std::pair<double, double>> derivative_samples;  // (s, central difference)
};

/// d(s) = h(s) - s. Throws NoReturn.
double displacement(const PlanarSystem& system, const Section& section, double s,
                    const CycleOptions& opts = {});

/// d(s) at n evenly spaced points of [s_lo, s_hi]. Points with no return are NaN.
DisplacementProfile displacement_profile(const PlanarSystem& system, const Section& section,
                                         double s_lo, double s_hi, int n,
                                         const CycleOptions& opts = {});

/// Scan, bracket and refine zeros of d (sign changes and tangential zeros).
/// Returned cycles are ordered by s_star.
std::vector<LimitCycle> locate_cycles(const PlanarSystem& system, const Section& section,
                                      double s_lo, double s_hi, int n_scan,
                                      const CycleOptions& opts = {});

/// Integrate one period from section.point(s_star) and fill in everything
/// except stability and multiplicity. Throws NoReturn.
LimitCycle make_cycle(const PlanarSystem& system, const Section& section, double s_star,
                      const CycleOptions& opts = {});

/// exp(integral of div f over one period) - 1, by augmented integration.
double d_s_via_divergence(const PlanarSystem& system, const LimitCycle& cycle,
                          const FlowOptions& opts = {});

/// Derivative of the displacement with respect to a parameter at the cycle:
///   -w0 / |f(p0)| * exp(I(T)) * integral_0^T exp(-I(t)) f ^ f_mu dt,
/// I(t) = integral_0^t div f, evaluated at p0 = section.point(s_star) and
/// expressed in the coordinate of `on` (default: the cycle's section). `on`
/// must pass through p0.
double d_mu_via_wedge(const PlanarSystem& system, const LimitCycle& cycle,
                      std::string_view parameter, const std::optional<Section>& on = std::nullopt,
                      const FlowOptions& opts = {});

struct MultiplicityEstimate {
  int multiplicity = 1;
  bool capped = false;  // true means ">= 3"
  /// Spacing at which the estimate was taken.
  double spacing = 0.0;
  /// Taylor coefficients of d at s_star, c_0 .. c_6.
  std::array<double, 7> taylor{};
};

/// Multiplicity of a zero of a displacement-like function from a 7-point
/// symmetric stencil. For a spacing h the scaled Taylor coefficients
/// a_k = c_k h^k are fitted exactly; order m is accepted when
/// |a_m| - e_m > sum_{j != m} (|a_j| + e_j), e_j being the noise propagated
/// through the fit (a Rouche-type count of zeros in the window). Spacing is
/// halved from h0 until no order separates; the last accepted order wins.
/// Throws NoiseDominated when no spacing gives a separated order.
MultiplicityEstimate estimate_multiplicity(const std::function<double(double)>& d, double s_star,
                                           double noise, double h0, int halvings = 30);

/// Same on the cycle's own displacement function.
MultiplicityEstimate estimate_multiplicity(const PlanarSystem& system, const LimitCycle& cycle,
                                           const CycleOptions& opts = {}, double h0 = 0.0);

/// Noise level used for multiplicity decisions: 100 x the estimated
/// return-map error.
double displacement_noise(const CycleOptions& opts, double scale);

/// Winding number of the closed orbit around a point.
int winding_around(const LimitCycle& cycle, const Vec2& point);

/// Largest distance of the orbit from a point.
double max_radius(const LimitCycle& cycle, const Vec2& point);

}  // namespace holling
