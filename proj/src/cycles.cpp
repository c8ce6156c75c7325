#include "holling/cycles.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace holling {

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::semistable: return "semistable";
    case Stability::undetermined: return "undetermined";
  }
  return "?";
}

double displacement(const PlanarSystem& system, const Section& section, double s,
                    const CycleOptions& opts) {
  return return_map(system, section, s, opts.max_period, opts.box, opts.flow) - s;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double safe_displacement(const PlanarSystem& system, const Section& section, double s,
                         const CycleOptions& opts) {
  try {
    return displacement(system, section, s, opts);
  } catch (const NumericalError&) {
    return kNaN;
  }
}

// Illinois iteration on a bracket [a, b] with fa * fb <= 0. Returns NaN when
// an evaluation inside the bracket fails.
double refine_root(const std::function<double(double)>& f, double a, double fa, double b,
                   double fb, double tol) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  int side = 0;
  double c = a;
  for (int it = 0; it < 200; ++it) {
    c = (fa * b - fb * a) / (fa - fb);
    if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
    const double fc = f(c);
    if (std::isnan(fc)) return kNaN;
    if (std::abs(fc) < tol || std::abs(b - a) < 1e-15 * (1.0 + std::abs(c))) return c;
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
  return c;
}

struct Root {
  double s;
  bool tangential;
};

}  // namespace

DisplacementProfile displacement_profile(const PlanarSystem& system, const Section& section,
                                         double s_lo, double s_hi, int n,
                                         const CycleOptions& opts) {
  if (n < 2 || !(s_hi > s_lo)) throw std::invalid_argument("displacement_profile: bad range");
  DisplacementProfile p{section, {}, {}};
  for (int i = 0; i < n; ++i) {
    const double s = s_lo + (s_hi - s_lo) * double(i) / double(n - 1);
    p.samples.emplace_back(s, safe_displacement(system, section, s, opts));
  }
  for (int i = 1; i + 1 < n; ++i) {
    const auto& l = p.samples[i - 1];
    const auto& r = p.samples[i + 1];
    p.derivative_samples.emplace_back(p.samples[i].first,
                                      (r.second - l.second) / (r.first - l.first));
  }
  return p;
}

LimitCycle make_cycle(const PlanarSystem& system, const Section& section, double s_star,
                      const CycleOptions& opts) {
  FlowOptions fo = opts.flow;
  fo.record_samples = true;
  fo.dense_substeps = std::max(fo.dense_substeps, 3);
  ReturnResult r = first_return(system, section, s_star, opts.max_period, opts.box, fo);

  LimitCycle c;
  c.section = section;
  c.s_star = s_star;
  c.period = r.period;
  c.orbit_samples = std::move(r.orbit.samples);
  c.closure_error = (c.orbit_samples.front().z - c.orbit_samples.back().z).norm();

  double area = 0.0;
  for (std::size_t i = 0; i + 1 < c.orbit_samples.size(); ++i) {
    area += wedge(c.orbit_samples[i].z, c.orbit_samples[i + 1].z);
  }
  c.orientation = area >= 0.0 ? 1 : -1;

  std::size_t best = 0;
  double fmax = -1.0;
  for (std::size_t i = 0; i < c.orbit_samples.size(); ++i) {
    const double fn = system.field(c.orbit_samples[i].z).norm();
    if (fn > fmax) {
      fmax = fn;
      best = i;
    }
  }
  const Vec2 p0 = c.orbit_samples[best].z;
  const Vec2 f0 = system.field(p0);
  const Vec2 outward = double(c.orientation) * Vec2(f0.y(), -f0.x());
  c.normal_section = Section(p0, outward);
  return c;
}

double d_s_via_divergence(const PlanarSystem& system, const LimitCycle& cycle,
                          const FlowOptions& opts) {
  using S3 = Eigen::Matrix<double, 3, 1>;
  const Vec2 p0 = cycle.point();
  const S3 y0(p0.x(), p0.y(), 0.0);
  const S3 yT = integrate_fixed<3>(
      [&system](const S3& y) -> S3 {
        const Vec2 z = y.head<2>();
        const Vec2 f = system.field(z);
        return S3(f.x(), f.y(), system.divergence(z));
      },
      y0, cycle.period, opts);
  return std::expm1(yT[2]);
}

double d_mu_via_wedge(const PlanarSystem& system, const LimitCycle& cycle,
                      std::string_view parameter, const std::optional<Section>& on,
                      const FlowOptions& opts) {
  using S4 = Eigen::Matrix<double, 4, 1>;
  const Vec2 p0 = cycle.point();
  const Section& sec = on ? *on : cycle.section;
  if (std::abs(sec.offset(p0)) > 1e-6 * (1.0 + p0.norm())) {
    throw std::invalid_argument("d_mu_via_wedge: section does not pass through the cycle point");
  }
  const std::string name(parameter);
  system.parameter(name);  // validates the name
  const S4 y0(p0.x(), p0.y(), 0.0, 0.0);
  const S4 yT = integrate_fixed<4>(
      [&system, &name](const S4& y) -> S4 {
        const Vec2 z = y.head<2>();
        const Vec2 f = system.field(z);
        const double w = wedge(f, system.parameter_derivative(name, z));
        return S4(f.x(), f.y(), system.divergence(z), std::exp(-y[2]) * w);
      },
      y0, cycle.period, opts);
  const Vec2 f0 = system.field(p0);
  const double fn = f0.norm();
  const double w0 = double(cycle.orientation);
  const Vec2 outward = w0 * Vec2(f0.y(), -f0.x()) / fn;
  const double d_normal = -w0 / fn * std::exp(yT[2]) * yT[3];
  const double cosine = sec.direction().dot(outward);
  if (std::abs(cosine) < 1e-8) throw QuadratureFailure("section tangent to the cycle");
  return d_normal / cosine;
}

double displacement_noise(const CycleOptions& opts, double scale) {
  return 100.0 * (opts.flow.tol.rtol * std::max(1.0, scale) + opts.flow.event_tol);
}

MultiplicityEstimate estimate_multiplicity(const std::function<double(double)>& d, double s_star,
                                           double noise, double h0, int halvings) {
  Eigen::Matrix<double, 7, 7> V;
  for (int i = 0; i < 7; ++i)
    for (int k = 0; k < 7; ++k) V(i, k) = std::pow(double(i - 3), k);
  const Eigen::Matrix<double, 7, 7> Vinv = V.inverse();
  Eigen::Matrix<double, 7, 1> amp;
  for (int k = 0; k < 7; ++k) amp[k] = noise * Vinv.row(k).cwiseAbs().sum();

  std::optional<MultiplicityEstimate> best;
  double h = h0;
  for (int j = 0; j <= halvings; ++j, h *= 0.5) {
    Eigen::Matrix<double, 7, 1> dv;
    bool ok = true;
    for (int i = 0; i < 7 && ok; ++i) {
      const double v = i == 3 ? d(s_star) : d(s_star + double(i - 3) * h);
      ok = std::isfinite(v);
      dv[i] = v;
    }
    if (!ok) continue;
    const Eigen::Matrix<double, 7, 1> a = Vinv * dv;

    int order = 0;
    for (int m = 1; m <= 6 && order == 0; ++m) {
      double rest = 0.0;
      for (int k = 0; k < 7; ++k)
        if (k != m) rest += std::abs(a[k]) + amp[k];
      if (std::abs(a[m]) - amp[m] > rest) order = m;
    }
    if (order > 0) {
      MultiplicityEstimate e;
      e.multiplicity = std::min(order, 3);
      e.capped = order >= 3;
      e.spacing = h;
      for (int k = 0; k < 7; ++k) e.taylor[k] = a[k] / std::pow(h, k);
      best = e;
      continue;
    }
    bool noise_floor = true;
    for (int k = 1; k < 7; ++k)
      if (std::abs(a[k]) > 10.0 * amp[k]) noise_floor = false;
    if (noise_floor) break;
  }
  if (!best) throw NoiseDominated("no derivative order separates from the noise level");
  return *best;
}

MultiplicityEstimate estimate_multiplicity(const PlanarSystem& system, const LimitCycle& cycle,
                                           const CycleOptions& opts, double h0) {
  const double scale = std::max({1.0, cycle.point().norm(), system.scale()});
  if (h0 <= 0.0) h0 = 0.02 * scale;
  auto d = [&](double s) { return safe_displacement(system, cycle.section, s, opts); };
  return estimate_multiplicity(d, cycle.s_star, displacement_noise(opts, scale), h0);
}

int winding_around(const LimitCycle& cycle, const Vec2& point) {
  double total = 0.0;
  const auto& s = cycle.orbit_samples;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const Vec2 a = s[i].z - point, b = s[i + 1].z - point;
    total += std::atan2(wedge(a, b), a.dot(b));
  }
  return int(std::lround(total / (2.0 * 3.14159265358979323846)));
}

double max_radius(const LimitCycle& cycle, const Vec2& point) {
  double r = 0.0;
  for (const auto& s : cycle.orbit_samples) r = std::max(r, (s.z - point).norm());
  return r;
}

std::vector<LimitCycle> locate_cycles(const PlanarSystem& system, const Section& section,
                                      double s_lo, double s_hi, int n_scan,
                                      const CycleOptions& opts) {
  const DisplacementProfile prof = displacement_profile(system, section, s_lo, s_hi, n_scan, opts);
  const auto& S = prof.samples;
  auto d = [&](double s) { return safe_displacement(system, section, s, opts); };

  std::vector<Root> roots;
  auto add_root = [&](double s, bool tangential) {
    if (std::isnan(s)) return;
    for (const auto& r : roots)
      if (std::abs(r.s - s) < 1e-7 * (1.0 + std::abs(s))) return;
    roots.push_back({s, tangential});
  };

  for (std::size_t i = 0; i + 1 < S.size(); ++i) {
    const double fa = S[i].second, fb = S[i + 1].second;
    if (std::isnan(fa) || std::isnan(fb)) continue;
    if ((fa < 0.0 && fb >= 0.0) || (fa > 0.0 && fb <= 0.0) || fa == 0.0) {
      add_root(refine_root(d, S[i].first, fa, S[i + 1].first, fb, opts.root_tol), false);
    }
  }

  // Tangential zeros and close pairs hidden between grid points: minimise the
  // sign-adjusted displacement around each local minimum of |d|.
  for (std::size_t i = 1; i + 1 < S.size(); ++i) {
    const double l = S[i - 1].second, m = S[i].second, r = S[i + 1].second;
    if (std::isnan(l) || std::isnan(m) || std::isnan(r)) continue;
    if (!((l > 0 && m > 0 && r > 0) || (l < 0 && m < 0 && r < 0))) continue;
    if (!(std::abs(m) <= std::abs(l) && std::abs(m) <= std::abs(r))) continue;
    const double sg = m > 0 ? 1.0 : -1.0;
    double a = S[i - 1].first, b = S[i + 1].first;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = sg * d(x1), f2 = sg * d(x2);
    double s_min = S[i].first, f_min = std::abs(m);
    for (int it = 0; it < 80 && !std::isnan(f1) && !std::isnan(f2); ++it) {
      if (f1 <= 0.0 || f2 <= 0.0) {
        const double c = f1 <= 0.0 ? x1 : x2, fc = f1 <= 0.0 ? f1 : f2;
        add_root(refine_root(d, S[i - 1].first, l, c, sg * fc, opts.root_tol), false);
        add_root(refine_root(d, c, sg * fc, S[i + 1].first, r, opts.root_tol), false);
        f_min = -1.0;
        break;
      }
      if (f1 < f_min) {
        f_min = f1;
        s_min = x1;
      }
      if (f2 < f_min) {
        f_min = f2;
        s_min = x2;
      }
      if (b - a < 1e-12 * (1.0 + std::abs(a))) break;
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = sg * d(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = sg * d(x2);
      }
    }
    if (f_min >= 0.0 && f_min < opts.tangent_tol) add_root(s_min, true);
  }
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.s < b.s; });

  std::vector<LimitCycle> out;
  for (const auto& root : roots) {
    LimitCycle c;
    try {
      c = make_cycle(system, section, root.s, opts);
    } catch (const NumericalError&) {
      continue;
    }
    std::optional<MultiplicityEstimate> me;
    if (opts.estimate_multiplicity) {
      try {
        me = estimate_multiplicity(system, c, opts);
        c.multiplicity_estimate = me->multiplicity;
        c.multiplicity_capped = me->capped;
      } catch (const NoiseDominated&) {
      }
    }
    if (opts.compute_d_s) {
      try {
        c.d_s_value = d_s_via_divergence(system, c, opts.flow);
      } catch (const QuadratureFailure&) {
        c.d_s_value = kNaN;
      }
    } else {
      const double eps = 1e-4 * (1.0 + std::abs(root.s));
      c.d_s_value = (d(root.s + eps) - d(root.s - eps)) / (2.0 * eps);
    }
    if (std::abs(c.d_s_value) >= opts.hyperbolic_tol) {
      c.stability = c.d_s_value < 0.0 ? Stability::stable : Stability::unstable;
    } else if (me) {
      const int m = me->multiplicity;
      if (m % 2 == 0 && !me->capped) {
        c.stability = Stability::semistable;
      } else {
        c.stability = me->taylor[m] < 0.0 ? Stability::stable : Stability::unstable;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace holling
