#include "holling/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace holling {

namespace {

template <typename T>
void take(std::optional<T>& slot, const Json& file, const char* key) {
  if (slot || !file.contains(key)) return;
  try {
    slot = file.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::string format_of(const RunConfig& cfg, const std::string& fallback,
                      std::initializer_list<const char*> allowed) {
  const std::string f = cfg.format.value_or(fallback);
  for (const char* a : allowed)
    if (f == a) return f;
  std::string msg = "--format " + f + " is not supported by '" + cfg.command + "' (use";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw ConfigError(msg + ")");
}

double required(const std::optional<double>& v, const char* name) {
  if (!v) throw ConfigError(std::string("missing required parameter --") + name);
  return *v;
}

SystemParams checked(double a, double b, double d, double l, double m, double g) {
  try {
    return SystemParams(a, b, d, l, m, g);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

CountOptions cycle_count_options() {
  CountOptions co;
  co.n_scan = 240;
  return co;
}

int emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out && !cfg.out->empty()) {
    std::ofstream f(*cfg.out, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + *cfg.out);
    f << text;
    if (!f) throw ConfigError("cannot write output file " + *cfg.out);
  } else {
    out << text;
  }
  return exit_ok;
}

// ---------------------------------------------------------------------------

int cmd_equilibria(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SystemParams p = resolve_params(cfg);
  const std::string fmt = format_of(cfg, "json", {"json", "csv"});
  const auto finite = find_finite(p);
  bool degenerate = std::any_of(finite.begin(), finite.end(),
                                [](const Equilibrium& e) { return e.degenerate; });
  std::vector<InfiniteEquilibrium> infinite;
  try {
    infinite = find_infinite(p);
  } catch (const DegenerateAtInfinity& e) {
    err << "warning: " << e.what() << "\n";
    infinite = e.merged;
    degenerate = true;
  }
  if (fmt == "csv") {
    emit(cfg, out, equilibria_csv(finite, infinite));
  } else {
    Json arr = Json::array();
    for (const auto& e : finite) {
      Json j;
      j["at_infinity"] = false;
      j.update(to_json(e));
      arr.push_back(std::move(j));
    }
    for (const auto& e : infinite) {
      Json j;
      j["at_infinity"] = true;
      j.update(to_json(e));
      arr.push_back(std::move(j));
    }
    emit(cfg, out, dump(arr));
  }
  if (degenerate) err << "degenerate singular points reported\n";
  return degenerate ? exit_degenerate : exit_ok;
}

int cmd_cycles(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SystemParams p = resolve_params(cfg);
  const std::string fmt = format_of(cfg, "json", {"json", "csv"});
  const auto counts = nested_cycles(p, cycle_count_options());
  std::vector<CycleRow> rows;
  for (const auto& nc : counts)
    for (const auto& c : nc.cycles) rows.push_back({nc.anti_saddle, c});
  const bool nonhyperbolic = std::any_of(rows.begin(), rows.end(), [](const CycleRow& r) {
    return r.cycle.stability == Stability::semistable ||
           r.cycle.stability == Stability::undetermined;
  });
  if (fmt == "csv") {
    emit(cfg, out, cycles_csv(rows));
  } else {
    Json j;
    j["params"] = to_json(p);
    j["anti_saddles"] = Json::array();
    for (const auto& nc : counts) {
      Json a;
      a["x"] = nc.anti_saddle.x();
      a["y"] = nc.anti_saddle.y();
      a["cycles"] = Json::array();
      for (const auto& c : nc.cycles) a["cycles"].push_back(to_json(c));
      j["anti_saddles"].push_back(std::move(a));
    }
    emit(cfg, out, dump(j));
  }
  if (nonhyperbolic) err << "nonhyperbolic cycle reported\n";
  return nonhyperbolic ? exit_degenerate : exit_ok;
}

int cmd_continue(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SystemParams p = resolve_params(cfg);
  const std::string fmt = format_of(cfg, "csv", {"csv", "json"});
  const std::string name = cfg.parameter.value_or("gamma");
  Parameter which;
  try {
    which = parse_parameter(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--parameter: ") + e.what());
  }
  const double from = p.get(which);
  const double to = cfg.to.value_or(from + 1.0);
  if (to == from) throw ConfigError("--to must differ from the current parameter value");
  const double step = std::abs(cfg.step.value_or(0.01));
  if (!(step > 0.0)) throw ConfigError("--step must be positive");

  std::vector<LimitCycle> all;
  for (auto& nc : nested_cycles(p, cycle_count_options()))
    for (auto& c : nc.cycles) all.push_back(std::move(c));
  const int k = cfg.cycle.value_or(0);
  if (k < 0 || k >= int(all.size())) {
    err << "no cycle with index " << k << " (found " << all.size() << ")\n";
    return exit_numerical;
  }
  StepPolicy policy;
  policy.initial_step = to > from ? step : -step;
  const HollingSystem sys(p);
  const Branch b = continue_branch(sys, all[std::size_t(k)], name, std::min(from, to),
                                   std::max(from, to), policy);
  if (fmt == "csv") {
    emit(cfg, out, branch_csv(b));
  } else {
    Json j;
    j["params"] = to_json(p);
    j["start"] = to_json(all[std::size_t(k)]);
    j["branch"] = to_json(b);
    emit(cfg, out, dump(j));
  }
  err << "termination: " << to_string(b.termination);
  if (!b.note.empty()) err << " (" << b.note << ")";
  err << "\n";
  return exit_ok;
}

int cmd_scenario(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  format_of(cfg, "json", {"json"});
  const SystemParams d = default_scenario_base();
  const SystemParams base = checked(0.0, 0.0, cfg.delta.value_or(d.delta()),
                                    cfg.lambda.value_or(d.lambda()), cfg.mu.value_or(d.mu()), 0.0);
  try {
    const ScenarioRecord r = reproduce_two_cycle_scenario(base);
    emit(cfg, out, dump(to_json(r)));
    return exit_ok;
  } catch (const ScenarioNotFound& e) {
    ScenarioRecord r;
    r.found = false;
    r.base = base;
    r.trace = e.trace;
    r.trace.push_back(std::string("not found: ") + e.what());
    emit(cfg, out, dump(to_json(r)));
    err << "scenario not found: " << e.what() << "\n";
    return exit_numerical;
  }
}

int cmd_audit(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  format_of(cfg, "json", {"json"});
  const int draws = cfg.draws.value_or(200);
  const int workers = cfg.workers.value_or(1);
  if (draws < 0) throw ConfigError("--draws must be >= 0");
  if (workers < 1) throw ConfigError("--workers must be >= 1");
  const AuditReport rep = audit_max_cycles(ParameterBox{}, draws, cfg.seed.value_or(42), {}, workers);
  emit(cfg, out, dump(to_json(rep)));
  return exit_ok;
}

int cmd_portrait(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const SystemParams p = resolve_params(cfg);
  format_of(cfg, "svg", {"svg"});
  emit(cfg, out, portrait_svg(build_portrait(p)));
  return exit_ok;
}

}  // namespace

void apply_config_file(RunConfig& cfg, const Json& file) {
  if (!file.is_object()) throw ConfigError("config file must contain a JSON object");
  static const char* known[] = {"alpha", "beta", "delta", "lambda", "mu",    "gamma", "format",
                                "out",   "seed", "draws", "workers", "parameter", "to", "step",
                                "cycle"};
  for (const auto& [key, value] : file.items()) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known))
      throw ConfigError("unknown config key '" + key + "'");
  }
  take(cfg.alpha, file, "alpha");
  take(cfg.beta, file, "beta");
  take(cfg.delta, file, "delta");
  take(cfg.lambda, file, "lambda");
  take(cfg.mu, file, "mu");
  take(cfg.gamma, file, "gamma");
  take(cfg.format, file, "format");
  take(cfg.out, file, "out");
  take(cfg.seed, file, "seed");
  take(cfg.draws, file, "draws");
  take(cfg.workers, file, "workers");
  take(cfg.parameter, file, "parameter");
  take(cfg.to, file, "to");
  take(cfg.step, file, "step");
  take(cfg.cycle, file, "cycle");
}

Json read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  try {
    return Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

SystemParams resolve_params(const RunConfig& cfg, bool require_alpha_beta) {
  const double a = require_alpha_beta ? required(cfg.alpha, "alpha") : cfg.alpha.value_or(0.0);
  const double b = require_alpha_beta ? required(cfg.beta, "beta") : cfg.beta.value_or(0.0);
  const double d = required(cfg.delta, "delta");
  const double l = required(cfg.lambda, "lambda");
  const double m = required(cfg.mu, "mu");
  return checked(a, b, d, l, m, cfg.gamma.value_or(0.0));
}

SystemParams default_scenario_base() { return SystemParams(0.0, 0.0, 0.2, 0.5, 0.0); }

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "equilibria") return cmd_equilibria(cfg, out, err);
    if (cfg.command == "cycles") return cmd_cycles(cfg, out, err);
    if (cfg.command == "continue") return cmd_continue(cfg, out, err);
    if (cfg.command == "scenario") return cmd_scenario(cfg, out, err);
    if (cfg.command == "audit") return cmd_audit(cfg, out, err);
    if (cfg.command == "portrait") return cmd_portrait(cfg, out, err);
    throw ConfigError("unknown command '" + cfg.command + "'");
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
}

// ---------------------------------------------------------------------------

Portrait build_portrait(const SystemParams& params) {
  Portrait pt{params, Box{}, find_finite(params), {}, {}};
  for (auto& nc : nested_cycles(params, cycle_count_options()))
    for (auto& c : nc.cycles) pt.cycles.push_back(std::move(c));

  double xr = 1.0 / params.lambda(), yr = 0.0;
  for (const auto& e : pt.equilibria) {
    if (e.location.x() < 0.0 || e.location.y() < 0.0) continue;
    xr = std::max(xr, e.location.x());
    yr = std::max(yr, e.location.y());
  }
  for (const auto& c : pt.cycles)
    for (const auto& s : c.orbit_samples) {
      xr = std::max(xr, s.z.x());
      yr = std::max(yr, s.z.y());
    }
  if (yr <= 0.0) yr = xr;
  pt.window = Box{0.0, 1.15 * xr, 0.0, 1.15 * yr};

  const HollingSystem sys(params);
  FlowOptions fo;
  fo.max_steps = 20000;
  const int n = 6;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const Vec2 z0(pt.window.x_max * i / (n + 1), pt.window.y_max * j / (n + 1));
      std::vector<Vec2> line;
      try {
        const Orbit o = integrate(sys, z0, 40.0, pt.window, std::nullopt, fo);
        const std::size_t stride = std::max<std::size_t>(1, o.samples.size() / 400);
        for (std::size_t k = 0; k < o.samples.size(); k += stride) line.push_back(o.samples[k].z);
        if (line.back() != o.last()) line.push_back(o.last());
      } catch (const NumericalError&) {
        continue;
      }
      pt.trajectories.push_back(std::move(line));
    }
  }
  return pt;
}

}  // namespace holling
