#pragma once

#include "holling/integrator.hpp"
#include "holling/vectorfield.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace holling {

struct Box {
  double x_min = 0.0, x_max = 50.0;
  double y_min = 0.0, y_max = 50.0;

  bool contains(const Vec2& z) const {
    return z.x() >= x_min && z.x() <= x_max && z.y() >= y_min && z.y() <= y_max;
  }
  double radius() const { return 0.5 * std::hypot(x_max - x_min, y_max - y_min); }

  /// Default first-quadrant working box [0, 50]^2.
  static Box first_quadrant() { return {}; }
  static Box symmetric(double r) { return {-r, r, -r, r}; }
};

/// A straight transversal. Coordinates: point(s) = anchor + s * direction.
/// Crossings are only accepted with s in [s_min, s_max].
class Section {
 public:
  enum class Orientation { positive_crossing, both };

  /// Throws std::invalid_argument if direction is zero or not finite.
  Section(const Vec2& anchor, const Vec2& direction,
          Orientation orientation = Orientation::positive_crossing,
          double s_min = -std::numeric_limits<double>::infinity(),
          double s_max = std::numeric_limits<double>::infinity());

  /// Half-line from the anchor (s >= 0).
  static Section ray(const Vec2& anchor, const Vec2& direction) {
    return Section(anchor, direction, Orientation::positive_crossing, 0.0);
  }

  const Vec2& anchor() const { return anchor_; }
  const Vec2& direction() const { return direction_; }
  /// direction rotated by +90 degrees.
  Vec2 normal() const { return {-direction_.y(), direction_.x()}; }
  Orientation orientation() const { return orientation_; }
  double s_min() const { return s_min_; }
  double s_max() const { return s_max_; }

  Vec2 point(double s) const { return anchor_ + s * direction_; }
  double coordinate(const Vec2& z) const { return (z - anchor_).dot(direction_); }
  double offset(const Vec2& z) const { return (z - anchor_).dot(normal()); }

 private:
  Vec2 anchor_, direction_;
  Orientation orientation_;
  double s_min_, s_max_;
};

enum class OrbitOutcome { converged_to_point, escaped_box, crossed_section, max_time };

struct OrbitSample {
  double t;
  Vec2 z;
};

struct SectionEvent {
  double t;
  Vec2 z;
  int section_id;
  double s;
};

struct Orbit {
  std::vector<OrbitSample> samples;
  OrbitOutcome outcome = OrbitOutcome::max_time;
  std::vector<SectionEvent> events;

  const Vec2& last() const { return samples.back().z; }
  double duration() const { return samples.back().t - samples.front().t; }
};

struct FlowOptions {
  Tolerances tol{};
  /// |f| below this counts as having reached an equilibrium.
  double convergence_tol = 1e-12;
  double event_tol = 1e-11;
  double h_min = 1e-13;
  long max_steps = 2'000'000;
  /// Extra dense-output samples recorded inside each accepted step.
  int dense_substeps = 0;
  bool record_samples = true;
};

/// Integrate until t_max, escape from box, convergence to an equilibrium or
/// the first accepted crossing of the optional section, whichever comes
/// first. Negative t_max integrates backwards in time. With a section, only
/// crossings in the same sense as the flow at the start point count (unless
/// the section orientation is `both`); a start point lying on the section is
/// not itself a crossing.
/// Throws StepSizeUnderflow with the last state.
Orbit integrate(const PlanarSystem& system, const Vec2& start, double t_max, const Box& box,
                const std::optional<Section>& section = std::nullopt,
                const FlowOptions& opts = {});

struct ReturnResult {
  double s;       // h(s)
  double period;  // time of flight
  Orbit orbit;
};

/// First return to the section from section.point(s). Throws NoReturn when
/// the orbit escapes, converges, or needs more than max_period.
ReturnResult first_return(const PlanarSystem& system, const Section& section, double s,
                          double max_period, const Box& box, const FlowOptions& opts = {});

/// h(s) only.
double return_map(const PlanarSystem& system, const Section& section, double s,
                  double max_period, const Box& box, const FlowOptions& opts = {});

/// Integrate an autonomous augmented state for exactly `duration` time units
/// and return the final state. Helper for quadratures along orbits.
template <int N>
Eigen::Matrix<double, N, 1> integrate_fixed(
    const typename DormandPrince<N>::Rhs& rhs, const Eigen::Matrix<double, N, 1>& y0,
    double duration, const FlowOptions& opts = {}) {
  DormandPrince<N> dp(rhs, opts.tol);
  typename DormandPrince<N>::Stepper st(dp, y0, 0.0);
  long steps = 0;
  while (st.t() < duration) {
    if (++steps > opts.max_steps) throw QuadratureFailure("step budget exhausted");
    try {
      st.advance(duration, opts.h_min);
    } catch (const std::underflow_error&) {
      throw QuadratureFailure("step size underflow in quadrature");
    }
    if (!st.y().allFinite()) throw QuadratureFailure("non-finite state in quadrature");
  }
  return st.y();
}

}  // namespace holling
