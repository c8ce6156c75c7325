#include "holling/flow.hpp"

#include <sstream>

namespace holling {

Section::Section(const Vec2& anchor, const Vec2& direction, Orientation orientation,
                 double s_min, double s_max)
    : anchor_(anchor), orientation_(orientation), s_min_(s_min), s_max_(s_max) {
  const double n = direction.norm();
  if (!is_finite(anchor) || !std::isfinite(n) || n == 0.0) {
    throw std::invalid_argument("section needs a finite anchor and nonzero direction");
  }
  direction_ = direction / n;
}

namespace {

using Dp2 = DormandPrince<2>;

const char* outcome_name(OrbitOutcome o) {
  switch (o) {
    case OrbitOutcome::converged_to_point: return "converged to a point";
    case OrbitOutcome::escaped_box: return "escaped the box";
    case OrbitOutcome::crossed_section: return "crossed the section";
    case OrbitOutcome::max_time: return "reached the time limit";
  }
  return "?";
}

// Illinois iteration on phi(tau) = offset(y(t0 + tau)) where y is a fresh
// RK step of length tau from the start of the accepted step.
Vec2 polish_crossing(const Dp2& dp, const Dp2::Step& step, const Section& sec, double tol,
                     double& tau_out) {
  double a = 0.0, b = step.h;
  double fa = sec.offset(step.y0), fb = sec.offset(step.y1);
  Vec2 zb = step.y1;
  if (std::abs(fb) <= tol) {
    tau_out = b;
    return zb;
  }
  int side = 0;
  for (int it = 0; it < 100; ++it) {
    const double c = (fa * b - fb * a) / (fa - fb);
    const Vec2 zc = dp.single_step(step.y0, step.k1, c);
    const double fc = sec.offset(zc);
    if (std::abs(fc) <= tol || std::abs(b - a) < 1e-15 * std::max(1.0, step.h)) {
      tau_out = c;
      return zc;
    }
    if ((fc > 0) == (fb > 0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  tau_out = 0.5 * (a + b);
  return dp.single_step(step.y0, step.k1, tau_out);
}

}  // namespace

Orbit integrate(const PlanarSystem& system, const Vec2& start, double t_max, const Box& box,
                const std::optional<Section>& section, const FlowOptions& opts) {
  if (!is_finite(start)) throw std::invalid_argument("integrate: start point is not finite");
  if (!box.contains(start)) throw std::invalid_argument("integrate: start point outside box");
  if (!(t_max != 0.0) || !std::isfinite(t_max)) {
    throw std::invalid_argument("integrate: t_max must be finite and nonzero");
  }
  const double dir = t_max > 0.0 ? 1.0 : -1.0;
  const double horizon = std::abs(t_max);

  Orbit orbit;
  orbit.samples.push_back({0.0, start});
  const Vec2 f0 = system.field(start);
  if (f0.norm() <= opts.convergence_tol) {
    orbit.outcome = OrbitOutcome::converged_to_point;
    return orbit;
  }

  Dp2 dp([&system, dir](const Vec2& z) -> Vec2 { return dir * system.field(z); }, opts.tol);
  Dp2::Stepper st(dp, start, 0.0);

  int ref_sign = 0;
  if (section && section->orientation() == Section::Orientation::positive_crossing) {
    const double fn = dir * f0.dot(section->normal());
    ref_sign = fn > 0 ? 1 : (fn < 0 ? -1 : 0);
  }

  for (long steps = 0; st.t() < horizon; ++steps) {
    if (steps >= opts.max_steps) break;
    Dp2::Step step;
    try {
      step = st.advance(horizon, opts.h_min);
    } catch (const std::underflow_error&) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << dir * st.t() << ", state (" << st.y().x() << ", "
          << st.y().y() << ")";
      throw StepSizeUnderflow(msg.str(), dir * st.t(), st.y());
    }

    if (section) {
      const double g0 = section->offset(step.y0), g1 = section->offset(step.y1);
      if ((g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0)) {
        const int sense = g1 > g0 ? 1 : -1;
        if (ref_sign == 0 || sense == ref_sign) {
          double tau = step.h;
          const Vec2 z = polish_crossing(dp, step, *section, opts.event_tol, tau);
          const double s = section->coordinate(z);
          if (s >= section->s_min() && s <= section->s_max()) {
            if (opts.record_samples) {
              for (int k = 1; k <= opts.dense_substeps; ++k) {
                const double tk = step.t0 + step.h * k / (opts.dense_substeps + 1);
                if (tk < step.t0 + tau) orbit.samples.push_back({dir * tk, step.dense(tk)});
              }
            }
            orbit.samples.push_back({dir * (step.t0 + tau), z});
            orbit.events.push_back({dir * (step.t0 + tau), z, 0, s});
            orbit.outcome = OrbitOutcome::crossed_section;
            return orbit;
          }
        }
      }
    }

    if (opts.record_samples) {
      for (int k = 1; k <= opts.dense_substeps; ++k) {
        const double tk = step.t0 + step.h * k / (opts.dense_substeps + 1);
        orbit.samples.push_back({dir * tk, step.dense(tk)});
      }
      orbit.samples.push_back({dir * step.t1(), step.y1});
    } else {
      orbit.samples.back() = {dir * step.t1(), step.y1};
    }
    if (!is_finite(step.y1) || !box.contains(step.y1)) {
      orbit.outcome = OrbitOutcome::escaped_box;
      return orbit;
    }
    if (st.dy().norm() <= opts.convergence_tol) {
      orbit.outcome = OrbitOutcome::converged_to_point;
      return orbit;
    }
  }
  orbit.outcome = OrbitOutcome::max_time;
  return orbit;
}

ReturnResult first_return(const PlanarSystem& system, const Section& section, double s,
                          double max_period, const Box& box, const FlowOptions& opts) {
  const Vec2 start = section.point(s);
  if (!box.contains(start)) {
    throw NoReturn("start point of the return map lies outside the box");
  }
  Orbit orbit = integrate(system, start, max_period, box, section, opts);
  if (orbit.outcome != OrbitOutcome::crossed_section) {
    std::ostringstream msg;
    msg << "no return to the section from s = " << s << ": orbit "
        << outcome_name(orbit.outcome);
    throw NoReturn(msg.str());
  }
  const SectionEvent& ev = orbit.events.back();
  return {ev.s, ev.t, std::move(orbit)};
}

double return_map(const PlanarSystem& system, const Section& section, double s,
                  double max_period, const Box& box, const FlowOptions& opts) {
  FlowOptions o = opts;
  o.record_samples = false;
  return first_return(system, section, s, max_period, box, o).s;
}

}  // namespace holling
