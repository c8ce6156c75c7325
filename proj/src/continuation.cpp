#include "holling/continuation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace holling {

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::fold: return "fold";
    case Termination::cycle_vanished: return "cycle-vanished";
    case Termination::escaped_box: return "escaped-box";
    case Termination::shrank_to_point: return "shrank-to-point";
    case Termination::parameter_bound: return "parameter-bound";
  }
  return "?";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

double safe_d(const PlanarSystem& sys, const Section& sec, double s, const CycleOptions& o) {
  if (s < sec.s_min() || s > sec.s_max()) return kNaN;
  try {
    return displacement(sys, sec, s, o);
  } catch (const NumericalError&) {
    return kNaN;
  }
}

double bisect_root(const std::function<double(double)>& f, double a, double fa, double b,
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

// Root of d with the slope sign of the tracked branch (sigma = sign of d_s),
// searched outward from s_pred. NaN on failure.
double relocate(const PlanarSystem& sys, const Section& sec, double s_pred, double sigma,
                double w0, double max_jump, const CycleOptions& o) {
  auto d = [&](double s) { return safe_d(sys, sec, s, o); };
  const double d0 = d(s_pred);
  if (std::isnan(d0)) return kNaN;
  // sigma < 0 (stable): d > 0 left of the root. Move towards the sign flip.
  const double dir = (sigma * d0 > 0.0) ? -1.0 : 1.0;
  double a = s_pred, fa = d0, w = w0;
  for (int k = 0; k < 14; ++k, w *= 2.0) {
    const double b = s_pred + dir * w;
    if (std::abs(b - s_pred) > max_jump) return kNaN;
    const double fb = d(b);
    if (std::isnan(fb)) return kNaN;
    if ((fa > 0.0) != (fb > 0.0)) return bisect_root(d, a, fa, b, fb, o.root_tol);
    a = b;
    fa = fb;
  }
  return kNaN;
}

double cycle_d_s(const PlanarSystem& sys, const Section& sec, double s, double period,
                 const CycleOptions& o) {
  LimitCycle c;
  c.section = sec;
  c.s_star = s;
  c.period = period;
  return d_s_via_divergence(sys, c, o.flow);
}

// Maximum of sign * d over [a, b] by golden-section search; returns (s, value).
std::pair<double, double> extremum(const std::function<double(double)>& d, double sign, double a,
                                   double b, int iters = 60) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = sign * d(x1), f2 = sign * d(x2);
  for (int i = 0; i < iters && std::abs(b - a) > 1e-13 * (1.0 + std::abs(a)); ++i) {
    if (std::isnan(f1) || std::isnan(f2)) return {kNaN, kNaN};
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = sign * d(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = sign * d(x2);
    }
  }
  return f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

struct FoldSearch {
  bool ok = false;
  Fold fold;
  double partner_s = 0.0;
};

// Starting from a parameter p_ok where the tracked root s_cur exists and a
// parameter p_bad where re-location failed, find the partner root at p_ok
// and the parameter at which both merge.
FoldSearch locate_fold(const PlanarSystem& system, const Section& sec, std::string_view name,
                       double p_ok, double p_bad, double s_cur, double sigma, double scale,
                       const CycleOptions& o) {
  FoldSearch out;
  auto sys_at = [&](double p) { return system.with_parameter(name, p); };
  auto at_ok = sys_at(p_ok);
  auto d_ok = [&](double s) { return safe_d(*at_ok, sec, s, o); };

  // Partner: nearest root with the opposite slope in a window around s_cur.
  const double W = 0.05 * scale;
  const int n = 80;
  double partner = kNaN;
  for (double side : {-1.0, 1.0}) {
    double prev_s = s_cur, prev_d = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double s = s_cur + side * W * double(k) / n;
      const double v = d_ok(s);
      if (std::isnan(v)) break;
      if (k > 1 && (v > 0.0) != (prev_d > 0.0)) {
        const double slope = (v - prev_d) / (s - prev_s);
        if (sgn(slope) != sigma) {
          const double r = bisect_root(d_ok, prev_s, prev_d, s, v, o.root_tol);
          if (!std::isnan(r) && (std::isnan(partner) || std::abs(r - s_cur) < std::abs(partner - s_cur)))
            partner = r;
        }
        break;
      }
      prev_s = s;
      prev_d = v;
    }
  }
  if (std::isnan(partner)) return out;
  out.partner_s = partner;

  const double lo_s = std::min(s_cur, partner), hi_s = std::max(s_cur, partner);
  const double gap = hi_s - lo_s;
  const double between = sgn(d_ok(0.5 * (lo_s + hi_s)));
  auto g = [&](double p, double* where) {
    auto sp = sys_at(p);
    auto e = extremum([&](double s) { return safe_d(*sp, sec, s, o); }, between,
                      std::max(sec.s_min(), lo_s - gap), hi_s + gap);
    if (where) *where = e.first;
    return e.second;
  };
  double a = p_ok, b = p_bad;
  double ga = g(a, nullptr), gb = g(b, nullptr);
  if (std::isnan(ga) || std::isnan(gb) || ga <= 0.0 || gb >= 0.0) return out;
  for (int it = 0; it < 60 && std::abs(b - a) > 1e-13 * (1.0 + std::abs(a)); ++it) {
    const double c = 0.5 * (a + b);
    const double gc = g(c, nullptr);
    if (std::isnan(gc)) return out;
    if (gc > 0.0) {
      a = c;
      ga = gc;
    } else {
      b = c;
      gb = gc;
    }
  }
  double s_f = 0.0;
  g(a, &s_f);
  out.fold.parameter = a;
  out.fold.s_star = s_f;

  auto sp = sys_at(a);
  try {
    LimitCycle c;
    c.section = sec;
    c.s_star = s_f;
    const MultiplicityEstimate me = estimate_multiplicity(*sp, c, o, 0.5 * gap + 1e-4 * scale);
    out.fold.multiplicity = me.multiplicity;
    out.fold.multiplicity_capped = me.capped;
  } catch (const NumericalError&) {
    out.fold.multiplicity = 0;
  }

  // Local census on both sides of the fold.
  const double eps = std::max(1e-7 * (1.0 + std::abs(a)), 4.0 * std::abs(b - a));
  const double dir = sgn(p_bad - p_ok);
  for (int side = 0; side < 2; ++side) {
    const double p = side == 0 ? a - dir * eps : a + dir * eps;
    double where = 0.0;
    const double gv = g(p, &where);
    int count = 0;
    if (gv > 0.0) {
      auto sq = sys_at(p);
      auto dq = [&](double s) { return safe_d(*sq, sec, s, o); };
      const double l = std::max(sec.s_min(), lo_s - gap), r = hi_s + gap;
      const double fl = dq(l), fr = dq(r), fm = dq(where);
      if (!std::isnan(fl) && (fl > 0.0) != (fm > 0.0)) ++count;
      if (!std::isnan(fr) && (fr > 0.0) != (fm > 0.0)) ++count;
    }
    (side == 0 ? out.fold.cycles_before : out.fold.cycles_after) = count;
  }
  out.ok = true;
  return out;
}

}  // namespace

Branch continue_branch(const PlanarSystem& system, const LimitCycle& start,
                       std::string_view parameter, double p_lo, double p_hi,
                       const StepPolicy& policy, const CycleOptions& opts) {
  if (!(p_hi > p_lo)) throw std::invalid_argument("continue_branch: empty parameter range");
  const std::string name(parameter);
  Branch br;
  br.parameter = name;
  const Section& sec = start.section;
  const double scale = std::max(1.0, start.point().norm());

  double p = system.parameter(name);
  double s = start.s_star;
  double d_s = start.d_s_value;
  if (d_s == 0.0) d_s = d_s_via_divergence(system, start, opts.flow);
  double sigma = sgn(d_s);
  br.points.push_back({p, s, start.period, d_s});

  double h = policy.initial_step;
  const double h0 = std::abs(policy.initial_step);
  int turns = 0;
  double last_dp = 0.0, last_ds = 0.0;

  while (int(br.points.size()) < policy.max_points) {
    const double bound = h > 0.0 ? p_hi : p_lo;
    if ((h > 0.0 && p >= p_hi) || (h < 0.0 && p <= p_lo)) {
      br.termination = Termination::parameter_bound;
      return br;
    }
    const double p_new = h > 0.0 ? std::min(p + h, bound) : std::max(p + h, bound);
    const double dp = p_new - p;
    auto sys = system.with_parameter(name, p_new);
    const double s_pred = last_dp != 0.0 ? s + last_ds / last_dp * dp : s;
    const double w0 = std::max(1e-6 * scale, 2.0 * std::abs(s_pred - s));
    const double s_new = relocate(*sys, sec, s_pred, sigma, w0, 0.2 * scale, opts);

    if (!std::isnan(s_new)) {
      try {
        const LimitCycle c = make_cycle(*sys, sec, s_new, opts);
        double diameter = 0.0;
        for (const auto& smp : c.orbit_samples)
          diameter = std::max(diameter, (smp.z - c.orbit_samples.front().z).norm());
        const double ds_new = d_s_via_divergence(*sys, c, opts.flow);
        if (diameter < policy.shrink_tol * scale) {
          br.termination = Termination::shrank_to_point;
          return br;
        }
        br.points.push_back({p_new, s_new, c.period, ds_new});
        last_dp = dp;
        last_ds = s_new - s;
        p = p_new;
        s = s_new;
        d_s = ds_new;
        h = sgn(h) * std::min(std::abs(h) * policy.grow, policy.max_step);
        continue;
      } catch (const NumericalError&) {
      }
    }

    h *= 0.5;
    if (std::abs(h) >= policy.min_step) continue;

    // Step collapsed: classify the end of the branch.
    if (s - sec.s_min() < 1e-3 * scale) {
      br.termination = Termination::shrank_to_point;
      return br;
    }
    try {
      auto here = system.with_parameter(name, p);
      const LimitCycle c = make_cycle(*here, sec, s, opts);
      const Box& bx = opts.box;
      const double margin = 0.02 * std::max(bx.x_max - bx.x_min, bx.y_max - bx.y_min);
      // The coordinate axes are invariant, so only the far sides count as escape.
      for (const auto& smp : c.orbit_samples) {
        if (bx.x_max - smp.z.x() < margin || bx.y_max - smp.z.y() < margin ||
            (bx.x_min < 0.0 && smp.z.x() - bx.x_min < margin) ||
            (bx.y_min < 0.0 && smp.z.y() - bx.y_min < margin)) {
          br.termination = Termination::escaped_box;
          return br;
        }
      }
    } catch (const NumericalError&) {
    }

    const FoldSearch fs =
        locate_fold(system, sec, name, p, p + 2.0 * h, s, sigma, scale, opts);
    if (!fs.ok) {
      br.termination = Termination::cycle_vanished;
      br.note = "cycle lost: re-location failed after step halving";
      return br;
    }
    br.folds.push_back(fs.fold);
    if (turns >= policy.max_turns) {
      br.termination = Termination::fold;
      return br;
    }
    ++turns;
    // Follow the partner branch back from the last accepted parameter.
    auto here = system.with_parameter(name, p);
    double period = 0.0;
    try {
      period = first_return(*here, sec, fs.partner_s, opts.max_period, opts.box).period;
    } catch (const NumericalError&) {
      br.termination = Termination::fold;
      br.note = "partner branch could not be started";
      return br;
    }
    s = fs.partner_s;
    sigma = -sigma;
    d_s = cycle_d_s(*here, sec, s, period, opts);
    br.points.push_back({p, s, period, d_s});
    h = -sgn(h) * h0;
    last_dp = 0.0;
    last_ds = 0.0;
  }
  br.termination = Termination::parameter_bound;
  br.note = "point budget exhausted";
  return br;
}

bool monotone_between_folds(const Branch& b) {
  for (std::size_t i = 1; i < b.points.size(); ++i) {
    const auto& a = b.points[i - 1];
    const auto& c = b.points[i];
    if ((a.d_s < 0.0) != (c.d_s < 0.0)) continue;  // fold between them
    if (a.parameter == c.parameter) continue;     // branch turn
    if (i >= 2) {
      const auto& z = b.points[i - 2];
      if ((z.d_s < 0.0) != (a.d_s < 0.0) || z.parameter == a.parameter) continue;
      const double t1 = (a.s_star - z.s_star) / (a.parameter - z.parameter);
      const double t2 = (c.s_star - a.s_star) / (c.parameter - a.parameter);
      if (!(t1 * t2 > 0.0)) return false;
    } else if (c.s_star == a.s_star) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

Section ray_from(const Vec2& anti_saddle, const Box& box) {
  return Section(anti_saddle, Vec2(0.0, 1.0), Section::Orientation::positive_crossing, 0.0,
                 box.y_max - anti_saddle.y());
}

std::vector<NestedCount> nested_cycles(const SystemParams& params, const CountOptions& opts) {
  std::vector<NestedCount> out;
  const HollingSystem sys(params);
  for (const Equilibrium& e : find_finite(params)) {
    if (!e.in_open_first_quadrant || !e.is_anti_saddle()) continue;
    NestedCount nc;
    nc.anti_saddle = e.location;
    const Section sec = ray_from(e.location, opts.cycle.box);
    const double L = 0.999 * sec.s_max();
    const double eps = 1e-4 * (1.0 + e.location.norm());
    if (L <= eps) {
      out.push_back(nc);
      continue;
    }
    const double cut1 = std::max(2.0 * eps, 0.02 * L), cut2 = std::max(2.0 * cut1, 0.2 * L);
    const int q = std::max(8, opts.n_scan / 4);
    std::vector<LimitCycle> found;
    for (const auto& [a, b, n] : {std::tuple{eps, cut1, q}, std::tuple{cut1, cut2, q},
                                  std::tuple{cut2, L, std::max(8, opts.n_scan - 2 * q)}}) {
      if (!(b > a)) continue;
      for (auto& c : locate_cycles(sys, sec, a, b, n, opts.cycle)) {
        const bool dup = std::any_of(found.begin(), found.end(), [&](const LimitCycle& f) {
          return std::abs(f.s_star - c.s_star) < 1e-6 * (1.0 + std::abs(c.s_star));
        });
        if (dup) continue;
        if (std::abs(winding_around(c, e.location)) != 1) continue;
        if (!(c.closure_error < opts.closure_tol)) continue;
        found.push_back(std::move(c));
      }
    }
    std::sort(found.begin(), found.end(),
              [](const LimitCycle& a, const LimitCycle& b) { return a.s_star < b.s_star; });
    nc.cycles = std::move(found);
    out.push_back(std::move(nc));
  }
  return out;
}

// ---------------------------------------------------------------------------

SystemParams draw_parameters(const ParameterBox& box, std::uint64_t seed, int index) {
  std::seed_seq seq{std::uint32_t(seed & 0xffffffffu), std::uint32_t(seed >> 32),
                    std::uint32_t(index)};
  std::mt19937_64 rng(seq);
  auto uniform = [&](double lo, double hi) {
    const double u = double(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  };
  const double a = uniform(box.alpha_lo, box.alpha_hi);
  const double b = uniform(box.beta_lo, box.beta_hi);
  const double d = uniform(box.delta_lo, box.delta_hi);
  const double l = uniform(box.lambda_lo, box.lambda_hi);
  const double m = uniform(box.mu_lo, box.mu_hi);
  return SystemParams(a, b, d, l, m);
}

DrawRecord audit_draw(const SystemParams& params, int index, const AuditOptions& opts) {
  DrawRecord r;
  r.index = index;
  r.params = params;
  try {
    CountOptions co = opts.count;
    co.cycle.estimate_multiplicity = false;
    const auto counts = nested_cycles(params, co);
    r.anti_saddles = int(counts.size());
    for (const auto& c : counts) r.max_nested = std::max(r.max_nested, int(c.cycles.size()));
    if (r.max_nested >= 3) {
      CountOptions tight = co;
      tight.cycle.flow.tol.rtol = opts.tight_rtol;
      tight.cycle.flow.tol.atol = opts.tight_rtol * 1e-2;
      tight.n_scan = opts.tight_n_scan;
      r.max_nested = 0;
      for (const auto& c : nested_cycles(params, tight))
        r.max_nested = std::max(r.max_nested, int(c.cycles.size()));
      r.reverified = true;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

AuditReport audit_max_cycles(const ParameterBox& box, int draws, std::uint64_t seed,
                             const AuditOptions& opts, int workers) {
  if (draws < 0) throw std::invalid_argument("audit: draws must be >= 0");
  AuditReport rep;
  rep.seed = seed;
  rep.draws = draws;
  rep.records.resize(std::size_t(draws));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < draws; i = next++) {
      rep.records[std::size_t(i)] = audit_draw(draw_parameters(box, seed, i), i, opts);
    }
  };
  workers = std::max(1, std::min(workers, std::max(1, draws)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (const auto& r : rep.records) {
    rep.max_nested_cycles_observed = std::max(rep.max_nested_cycles_observed, r.max_nested);
    if (r.max_nested >= 3) rep.violations.push_back(r);
  }
  return rep;
}

namespace {

struct Census {
  bool ok = false;  // exactly one interior anti-saddle
  Vec2 anti_saddle = Vec2::Zero();
  double trace = 0.0;
  std::vector<LimitCycle> cycles;
};

Census census(const SystemParams& p, const CountOptions& co) {
  Census c;
  std::vector<Equilibrium> anti;
  for (const auto& e : find_finite(p))
    if (e.in_open_first_quadrant && e.is_anti_saddle()) anti.push_back(e);
  if (anti.size() != 1) return c;
  c.anti_saddle = anti[0].location;
  c.trace = anti[0].trace;
  try {
    for (auto& nc : nested_cycles(p, co))
      if ((nc.anti_saddle - c.anti_saddle).norm() < 1e-9) c.cycles = std::move(nc.cycles);
  } catch (const NumericalError&) {
    return c;
  }
  c.ok = true;
  return c;
}

bool is_one_unstable(const Census& c) {
  return c.ok && c.trace < 0.0 && c.cycles.size() == 1 &&
         c.cycles[0].stability == Stability::unstable;
}

bool is_two_nested(const Census& c) {
  return c.ok && c.trace < 0.0 && c.cycles.size() == 2 &&
         c.cycles[0].stability == Stability::unstable &&
         c.cycles[1].stability == Stability::stable;
}

// Trace of the interior anti-saddle, NaN when there is not exactly one.
double anti_saddle_trace(const SystemParams& p) {
  double tr = kNaN;
  int n = 0;
  for (const auto& e : find_finite(p)) {
    if (!e.in_open_first_quadrant || e.determinant <= 0.0) continue;
    tr = e.trace;
    ++n;
  }
  return n == 1 ? tr : kNaN;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

ScenarioStage stage(const std::string& label, const SystemParams& p, const Census& c) {
  return {label, p, c.anti_saddle, c.cycles};
}

}  // namespace

ScenarioRecord reproduce_two_cycle_scenario(const SystemParams& base,
                                            const ScenarioBudget& budget) {
  ScenarioRecord rec;
  rec.base = base.with(Parameter::alpha, 0.0).with(Parameter::beta, 0.0).with(Parameter::gamma, 0.0);
  auto& trace = rec.trace;
  auto at = [&](double a, double b) {
    return rec.base.with(Parameter::alpha, a).with(Parameter::beta, b);
  };

  // (i) alpha = beta = 0: dense scan around every anti-saddle.
  {
    CountOptions dense = budget.count;
    dense.n_scan = std::max(4 * budget.count.n_scan, 400);
    const SystemParams p0 = at(0.0, 0.0);
    int total = 0;
    Vec2 a0 = Vec2::Zero();
    std::vector<LimitCycle> none;
    for (auto& nc : nested_cycles(p0, dense)) {
      total += int(nc.cycles.size());
      a0 = nc.anti_saddle;
    }
    trace.push_back("stage i: alpha = beta = 0, cycles found = " + std::to_string(total));
    if (total != 0) throw ScenarioNotFound("cycles present at alpha = beta = 0", trace);
    rec.stages.push_back({"i: alpha = beta = 0, no cycles", p0, a0, none});
  }

  // (ii)-(iv): for each beta < 0, locate Hopf points of the anti-saddle on an
  // alpha grid, step away from each one on the side where the anti-saddle is
  // stable and look for Gamma1 alone, then Gamma1 inside a stable Gamma2, then
  // the fold of the two. Candidates whose fold lies in the direction of
  // increasing alpha are preferred; the first other one is kept as fallback.
  std::optional<ScenarioRecord> fallback;
  const int nb = std::max(2, budget.beta_samples);
  const int na = std::max(2, budget.alpha_samples);
  for (int ib = 1; ib < nb; ++ib) {
    const double beta = budget.beta_min * double(ib) / double(nb - 1);
    std::vector<double> tr(static_cast<std::size_t>(na));
    for (int ia = 0; ia < na; ++ia)
      tr[std::size_t(ia)] = anti_saddle_trace(at(budget.alpha_max * ia / (na - 1), beta));
    for (int ia = 0; ia + 1 < na; ++ia) {
      const double t0 = tr[std::size_t(ia)], t1 = tr[std::size_t(ia + 1)];
      if (std::isnan(t0) || std::isnan(t1) || (t0 < 0.0) == (t1 < 0.0)) continue;
      double lo = budget.alpha_max * ia / (na - 1), hi = budget.alpha_max * (ia + 1) / (na - 1);
      double tlo = t0;
      for (int it = 0; it < 2 * budget.refine_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double tm = anti_saddle_trace(at(mid, beta));
        if (std::isnan(tm)) break;
        if ((tm < 0.0) == (tlo < 0.0)) {
          lo = mid;
          tlo = tm;
        } else {
          hi = mid;
        }
      }
      const double a_h = 0.5 * (lo + hi);
      // Direction of alpha in which the anti-saddle is stable.
      const double dir = t0 < 0.0 ? -1.0 : 1.0;
      if (fallback && dir < 0.0) continue;
      trace.push_back("beta = " + fmt(beta) + ": Hopf at alpha = " + fmt(a_h) +
                      (dir > 0.0 ? " (restabilizing)" : " (destabilizing)"));

      // Geometric offsets away from the Hopf point.
      double off_u = kNaN, off_us = kNaN;
      Census c_u;
      for (double off = 1e-4; off < 2.0 && a_h + dir * off >= 0.0; off *= 2.0) {
        const Census c = census(at(a_h + dir * off, beta), budget.count);
        if (std::isnan(off_u)) {
          if (is_one_unstable(c)) {
            off_u = off;
            c_u = c;
            continue;
          }
          if (c.ok && !c.cycles.empty()) break;
          continue;
        }
        if (is_one_unstable(c)) {
          off_u = off;
          c_u = c;
          continue;
        }
        if (is_two_nested(c)) off_us = off;
        break;
      }
      if (std::isnan(off_u)) {
        trace.push_back("  no lone unstable cycle next to it");
        continue;
      }
      const SystemParams p_u = at(a_h + dir * off_u, beta);
      trace.push_back("  one unstable cycle at alpha = " + fmt(p_u.alpha()) +
                      ", s* = " + fmt(c_u.cycles[0].s_star));
      if (std::isnan(off_us)) {
        trace.push_back("  no outer stable cycle appears");
        continue;
      }

      // Threshold where Gamma2 appears.
      double in_u = off_u, in_us = off_us;
      Census c_us = census(at(a_h + dir * off_us, beta), budget.count);
      for (int it = 0; it < budget.refine_iterations && in_us - in_u > 1e-9 * (1.0 + a_h); ++it) {
        const double mid = 0.5 * (in_u + in_us);
        const Census c = census(at(a_h + dir * mid, beta), budget.count);
        if (is_two_nested(c)) {
          in_us = mid;
          c_us = c;
        } else if (is_one_unstable(c)) {
          in_u = mid;
        } else {
          break;
        }
      }
      const double a_appear = a_h + dir * in_us;
      const double box_r = budget.count.cycle.box.radius();
      const double amp = max_radius(c_us.cycles[1], c_us.anti_saddle);
      trace.push_back("  stable outer cycle appears at alpha = " + fmt(a_appear) +
                      " with amplitude " + fmt(amp) + " (" + fmt(amp / box_r) +
                      " of the box radius)");

      // (iv) follow Gamma2 in the same direction until it meets Gamma1.
      const SystemParams p_start = at(a_h + dir * off_us, beta);
      const Census c_start = census(p_start, budget.count);
      if (!is_two_nested(c_start)) continue;
      StepPolicy pol;
      pol.initial_step = dir * std::max(1e-4, 0.02 * off_us);
      pol.max_step = 0.05;
      pol.max_turns = 0;
      const HollingSystem sys(p_start);
      const double a0 = p_start.alpha();
      const Branch br = continue_branch(sys, c_start.cycles[1], "alpha",
                                        dir > 0.0 ? a0 : std::max(0.0, a0 - 4.0),
                                        dir > 0.0 ? a0 + 4.0 : a0, pol, budget.count.cycle);
      if (br.folds.empty()) {
        trace.push_back(std::string("  continuation of the outer cycle ended without a fold: ") +
                        std::string(to_string(br.termination)));
        continue;
      }
      const Fold fold = br.folds.front();
      trace.push_back("  fold at alpha = " + fmt(fold.parameter) + ", s* = " + fmt(fold.s_star) +
                      ", multiplicity " + std::to_string(fold.multiplicity) + ", cycles " +
                      std::to_string(fold.cycles_before) + " -> " +
                      std::to_string(fold.cycles_after));

      ScenarioRecord r = rec;
      r.found = true;
      r.stages.push_back(stage("ii: beta < 0, one unstable cycle around a stable anti-saddle",
                               p_u, c_u));
      // Snapshot halfway between the appearance of Gamma2 and the fold.
      const SystemParams p_mid = at(0.5 * (a_appear + fold.parameter), beta);
      Census c_mid = census(p_mid, budget.count);
      if (!is_two_nested(c_mid)) {
        c_mid = c_start;
        r.stages.push_back(stage("iii: two nested cycles, inner unstable, outer stable", p_start,
                                 c_mid));
      } else {
        r.stages.push_back(stage("iii: two nested cycles, inner unstable, outer stable", p_mid,
                                 c_mid));
      }
      const SystemParams p_fold = at(fold.parameter, beta);
      ScenarioStage iv{"iv: the cycles merge in a fold", p_fold, c_mid.anti_saddle, {}};
      try {
        const HollingSystem fsys(p_fold);
        CycleOptions co = budget.count.cycle;
        LimitCycle fc = make_cycle(fsys, c_start.cycles[1].section, fold.s_star, co);
        fc.stability = Stability::semistable;
        fc.d_s_value = d_s_via_divergence(fsys, fc, co.flow);
        fc.multiplicity_estimate = fold.multiplicity;
        fc.multiplicity_capped = fold.multiplicity_capped;
        iv.cycles.push_back(std::move(fc));
        for (const auto& e : find_finite(p_fold))
          if (e.in_open_first_quadrant && e.is_anti_saddle()) iv.anti_saddle = e.location;
      } catch (const NumericalError&) {
      }
      r.stages.push_back(std::move(iv));
      r.fold = fold;
      r.fold_alpha = fold.parameter;
      r.alpha_increasing = dir > 0.0;
      if (dir > 0.0) {
        r.trace = trace;
        return r;
      }
      trace.push_back("  kept as fallback: the fold is reached with decreasing alpha");
      fallback = std::move(r);
    }
  }
  if (fallback) {
    fallback->trace = trace;
    fallback->trace.push_back(
        "no candidate reaches the fold with increasing alpha; reporting the decreasing-alpha one");
    return *fallback;
  }
  throw ScenarioNotFound("no two-cycle sequence within the search budget", trace);
}

}  // namespace holling
