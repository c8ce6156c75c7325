#include "../unit/fixtures.hpp"
#include "holling/commands.hpp"
#include "holling/continuation.hpp"
#include "holling/cycles.hpp"
#include "holling/equilibria.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace holling;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << "  " << detail << std::endl;
  if (!ok) ++failures;
}

const Equilibrium* find_at(const std::vector<Equilibrium>& eqs, const Vec2& z, double tol) {
  for (const auto& e : eqs)
    if ((e.location - z).norm() <= tol) return &e;
  return nullptr;
}

void criterion_1() {
  const auto t0 = Clock::now();
  const ParameterBox box;
  int held = 0, skipped = 0, index = 0;
  while (held < 100 && index < 1000) {
    const SystemParams p = draw_parameters(box, 1, index++);
    try {
      const IndexAuditReport r = audit_index_theorems(p);
      if (!r.identity_holds) break;
      ++held;
    } catch (const InconclusiveAudit&) {
      ++skipped;
    }
  }
  const double dt = seconds_since(t0);
  std::ostringstream s;
  s << held << "/100 nondegenerate draws satisfy the index identity (" << skipped
    << " degenerate skipped), " << dt << " s";
  report(1, held == 100 && dt < 60, s.str());
}

void criterion_2() {
  const ParameterBox box;
  int ok = 0;
  for (int i = 0; i < 100; ++i) {
    const SystemParams p = draw_parameters(box, 1, i);
    const auto eqs = find_finite(p);
    const Equilibrium* o = find_at(eqs, Vec2(0, 0), 1e-12);
    const bool has_k = find_at(eqs, Vec2(1 / p.lambda(), 0), 1e-9 * (1 + 1 / p.lambda()));
    if (o && o->kind == EquilibriumKind::saddle && o->index == -1 && has_k) ++ok;
  }
  report(2, ok == 100, std::to_string(ok) + "/100 draws: origin saddle of index -1 and (1/lambda, 0) present");
}

void criterion_3() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coord(0.01, 3.0);
  const ParameterBox box;
  int alpha_ok = 0, gamma_ok = 0, beta_equal = 0, beta_sign = 0;
  for (int i = 0; i < 1000; ++i) {
    const SystemParams p = draw_parameters(box, 3, i).with(Parameter::gamma, coord(rng) - 1.5);
    const Vec2 z(coord(rng), coord(rng));
    const double x = z.x(), y = z.y();
    const double E = y * (p.delta() + p.mu() * y) - x * (1 - p.lambda() * x);
    const double want = x * x * x * x * y * E;
    const SystemParams p0 = p.unrotated();
    const double da = rotation_determinant(p0, z, RotationParameter::alpha);
    const double db = rotation_determinant(p0, z, RotationParameter::beta);
    const double dg = rotation_determinant(p, z, RotationParameter::gamma);
    if (std::abs(da - want) <= 1e-12 * std::abs(want)) ++alpha_ok;
    if (std::abs(da - db) <= 1e-12 * std::abs(da)) ++beta_equal;
    if ((da > 0) == (db > 0)) ++beta_sign;
    const Vec2 pq = eval_unrotated(p0, z);
    if (dg >= 0 && std::abs(dg - pq.squaredNorm()) <= 1e-12 * pq.squaredNorm()) ++gamma_ok;
  }
  std::ostringstream s;
  s << "D_alpha = x^4 y E at " << alpha_ok << "/1000; D_gamma = P^2+Q^2 >= 0 at " << gamma_ok
    << "/1000; D_alpha == D_beta at " << beta_equal << "/1000 (same sign at " << beta_sign
    << "/1000; D_alpha = x D_beta)";
  report(3, alpha_ok == 1000 && gamma_ok == 1000 && beta_equal == 1000, s.str());
}

struct Scenario {
  bool ran = false;
  ScenarioRecord record;
  double seconds = 0.0;
  std::string error;
};

Scenario run_scenario() {
  Scenario sc;
  const auto t0 = Clock::now();
  try {
    sc.record = reproduce_two_cycle_scenario(default_scenario_base());
    sc.ran = true;
  } catch (const ScenarioNotFound& e) {
    sc.error = e.what();
  }
  sc.seconds = seconds_since(t0);
  return sc;
}

void criterion_4(const Scenario& sc) {
  const fixtures::HopfNormalForm h(1.0);
  CycleOptions o;
  o.box = Box::symmetric(10);
  const Section sec(Vec2(1, 0), Vec2(1, 0));
  const LimitCycle c = make_cycle(h, sec, 0.0, o);
  const double ds = d_s_via_divergence(h, c);
  const double exact = std::expm1(-4 * 3.141592653589793);
  const double e = 1e-4;
  const double fd = (displacement(h, sec, e, o) - displacement(h, sec, -e, o)) / (2 * e);
  const double dmu = d_mu_via_wedge(h, c, "rho");
  const double fd_mu = (displacement(*h.with_parameter("rho", 1 + 1e-5), sec, 0.0, o) -
                        displacement(*h.with_parameter("rho", 1 - 1e-5), sec, 0.0, o)) / 2e-5;
  bool ok = std::abs(ds - exact) < 1e-6 && std::abs(ds - fd) < 1e-3 * std::abs(fd) &&
            std::abs(dmu - fd_mu) < 1e-2 * std::abs(fd_mu);
  std::ostringstream s;
  s << "fixture |d_s - (e^-4pi - 1)| = " << std::abs(ds - exact)
    << ", slope rel err " << std::abs(ds - fd) / std::abs(fd)
    << ", d_rho rel err " << std::abs(dmu - fd_mu) / std::abs(fd_mu);

  if (!sc.ran || sc.record.stages.size() < 3 || sc.record.stages[2].cycles.empty()) {
    report(4, false, s.str() + "; no quartic cycle available");
    return;
  }
  const ScenarioStage& st = sc.record.stages[2];
  const HollingSystem sys(st.params);
  const CycleOptions qo;
  double worst = 0.0;
  for (const LimitCycle& q : st.cycles) {
    for (const char* w : {"alpha", "beta", "gamma", "delta", "lambda"}) {
      const double v = sys.parameter(w), eps = 1e-5;
      const double fdq = (displacement(*sys.with_parameter(w, v + eps), q.section, q.s_star, qo) -
                          displacement(*sys.with_parameter(w, v - eps), q.section, q.s_star, qo)) /
                         (2 * eps);
      worst = std::max(worst, std::abs(d_mu_via_wedge(sys, q, w) - fdq) / std::abs(fdq));
    }
  }
  ok = ok && worst < 1e-2;
  s << "; quartic cycles worst d_mu rel err " << worst;
  report(4, ok, s.str());
}

void criterion_5(const Scenario& sc) {
  if (!sc.ran) {
    report(5, false, "scenario not found: " + sc.error);
    return;
  }
  const double dt = sc.seconds;
  const ScenarioRecord& r = sc.record;
  const auto& st = r.stages;
  bool order = st.size() == 4 && st[0].cycles.empty() && st[0].params.alpha() == 0 &&
               st[0].params.beta() == 0 && st[1].cycles.size() == 1 &&
               st[1].params.beta() < 0 && st[1].cycles[0].stability == Stability::unstable &&
               st[2].cycles.size() == 2 && st[2].cycles[0].stability == Stability::unstable &&
               st[2].cycles[1].stability == Stability::stable && r.fold.multiplicity == 2;
  double closure = 0.0;
  for (std::size_t i = 1; i < st.size() && i < 3; ++i)
    for (const auto& c : st[i].cycles) closure = std::max(closure, c.closure_error);
  std::ostringstream s;
  s << "0 -> 1 unstable -> 2 nested (u, s) -> fold m=" << r.fold.multiplicity << " at alpha "
    << r.fold_alpha << (r.alpha_increasing ? " reached by increasing" : " reached by DECREASING")
    << " alpha from " << (st.size() > 2 ? st[2].params.alpha() : 0.0) << " (beta "
    << (st.size() > 1 ? st[1].params.beta() : 0.0) << "); max closure " << closure << ", " << dt
    << " s";
  report(5, order && r.alpha_increasing && closure < 1e-7 && dt < 600, s.str());
}

void criterion_6(const Scenario& sc) {
  const auto t0 = Clock::now();
  const AuditReport r = audit_max_cycles(ParameterBox{}, 200, 42);
  const double dt = seconds_since(t0);
  int errors = 0, with_anti_saddle = 0;
  for (const auto& d : r.records) {
    errors += !d.error.empty();
    with_anti_saddle += d.anti_saddles > 0;
  }
  std::ostringstream s;
  s << "max nested cycles " << r.max_nested_cycles_observed << ", violations "
    << r.violations.size() << ", draws with an interior anti-saddle " << with_anti_saddle
    << ", draws with numerical errors " << errors << ", " << dt << " s";
  if (sc.ran && sc.record.stages.size() > 2)
    s << "; pinned two-cycle draw counts " << audit_draw(sc.record.stages[2].params, 0).max_nested;
  report(6, r.max_nested_cycles_observed <= 2 && r.violations.empty() && dt < 1800, s.str());
}

void criterion_7(const Scenario& sc) {
  if (!sc.ran) {
    report(7, false, "no scenario cycles");
    return;
  }
  int branches = 0, monotone = 0, folds = 0, folds_m2 = 0;
  for (std::size_t k = 1; k < 3 && k < sc.record.stages.size(); ++k) {
    const ScenarioStage& st = sc.record.stages[k];
    const HollingSystem sys(st.params);
    for (const LimitCycle& c : st.cycles) {
      if (c.stability == Stability::semistable || c.stability == Stability::undetermined) continue;
      for (double dir : {1.0, -1.0}) {
        StepPolicy pol;
        pol.initial_step = 0.005 * dir;
        const Branch b = continue_branch(sys, c, "gamma", -0.5, 0.5, pol);
        ++branches;
        monotone += monotone_between_folds(b);
        for (const Fold& f : b.folds) {
          ++folds;
          folds_m2 += f.multiplicity == 2;
        }
      }
    }
  }
  std::ostringstream s;
  s << monotone << "/" << branches << " gamma branches monotone between folds, " << folds_m2 << "/"
    << folds << " folds of multiplicity 2";
  report(7, branches > 0 && monotone == branches && folds_m2 == folds, s.str());
}

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& cmd) {
  Run r;
  FILE* f = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!f) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(f);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

void criterion_8(const std::string& cli) {
  const std::string two = " --alpha 6.599754395434497 --beta -3 --delta 0.2 --lambda 0.5 --mu 0";
  const std::string one = " --alpha 0.5 --beta -1 --delta 0.3 --lambda 0.7 --mu 0.2";
  const std::vector<std::string> cmds = {
      "equilibria" + one,
      "equilibria --format csv" + one,
      "cycles" + two,
      "cycles --format csv" + two,
      "continue --parameter gamma --to 0.3" + two,
      "scenario --delta 0.2 --lambda 0.5 --mu 0",
      "portrait" + two,
      "audit --draws 12 --seed 7 --workers 4",
  };
  int same = 0;
  std::string bad;
  for (const auto& c : cmds) {
    const Run a = run(cli + " " + c), b = run(cli + " " + c);
    if (a.code >= 0 && !a.out.empty() && a.code == b.code && a.out == b.out) {
      ++same;
    } else {
      bad += " [" + c + "]";
    }
  }
  const Run w1 = run(cli + " audit --draws 12 --seed 7 --workers 1");
  const Run w4 = run(cli + " audit --draws 12 --seed 7 --workers 4");
  const bool workers_same = !w1.out.empty() && w1.out == w4.out && w1.code == w4.code;
  std::ostringstream s;
  s << same << "/" << cmds.size() << " commands byte-identical across two runs; audit --workers 1 vs 4 "
    << (workers_same ? "identical" : "DIFFERENT") << bad;
  report(8, same == int(cmds.size()) && workers_same, s.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: holling_acceptance <path to holling cli>\n";
    return 2;
  }
  criterion_1();
  criterion_2();
  criterion_3();
  const Scenario sc = run_scenario();
  criterion_4(sc);
  criterion_5(sc);
  criterion_6(sc);
  criterion_7(sc);
  criterion_8(argv[1]);
  std::cout << failures << " criteria failed" << std::endl;
  return failures == 0 ? 0 : 1;
}
