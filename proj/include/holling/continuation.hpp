#pragma once

#include "holling/cycles.hpp"
#include "holling/equilibria.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace holling {

enum class Termination { fold, cycle_vanished, escaped_box, shrank_to_point, parameter_bound };
std::string_view to_string(Termination t);

struct BranchPoint {
  double parameter;
  double s_star;
  double period;
  double d_s;
};

struct Fold {
  double parameter;
  double s_star;
  int multiplicity = 0;  // 0 when the estimate failed
  bool multiplicity_capped = false;
  /// Number of cycles found in a small window around s_star just before and
  /// just after the fold parameter.
  int cycles_before = 0, cycles_after = 0;
};

struct Branch {
  std::string parameter;
  std::vector<BranchPoint> points;
  std::vector<Fold> folds;
  Termination termination = Termination::parameter_bound;
  std::string note;
};

struct StepPolicy {
  double initial_step = 0.01;  // sign sets the direction
  double min_step = 1e-6;
  double max_step = 0.1;
  double grow = 1.5;
  int max_points = 5000;
  /// Continue on the partner branch after a fold (at most this many times).
  int max_turns = 1;
  /// A cycle whose orbit diameter falls below shrink_tol * scale has shrunk
  /// to a point.
  double shrink_tol = 5e-3;
};

/// Natural-parameter continuation of a located cycle on its section. Steps
/// shrink by half when the cycle cannot be re-located and grow by `grow`
/// after a success. When the step collapses next to a nonhyperbolic cycle the
/// fold is located as the zero of the local extremum of d, its multiplicity is
/// estimated, and the partner branch is followed back.
Branch continue_branch(const PlanarSystem& system, const LimitCycle& start,
                       std::string_view parameter, double p_lo, double p_hi,
                       const StepPolicy& policy = {}, const CycleOptions& opts = {});

/// True when s_star is strictly monotone in the parameter on every run of
/// consecutive points with the same d_s sign.
bool monotone_between_folds(const Branch& b);

// ---------------------------------------------------------------------------
// Nested cycles around anti-saddles

struct NestedCount {
  Vec2 anti_saddle;
  std::vector<LimitCycle> cycles;  // enclosing the anti-saddle, inner to outer
};

struct CountOptions {
  CycleOptions cycle{};
  int n_scan = 160;
  /// Cycles must close to this after one period.
  double closure_tol = 1e-7;
};

/// Ray section from the anti-saddle straight up to the top of the box.
Section ray_from(const Vec2& anti_saddle, const Box& box);

/// Limit cycles surrounding each anti-saddle of the open first quadrant,
/// located on the vertical ray above it. Only cycles with winding number +-1
/// about the anti-saddle that close within closure_tol are kept.
std::vector<NestedCount> nested_cycles(const SystemParams& params, const CountOptions& opts = {});

// ---------------------------------------------------------------------------
// Two-cycle scenario

struct ScenarioStage {
  std::string label;
  SystemParams params{0, 0, 1, 1, 0};
  Vec2 anti_saddle = Vec2::Zero();
  std::vector<LimitCycle> cycles;
};

struct ScenarioBudget {
  double beta_min = -6.0;
  int beta_samples = 61;
  double alpha_max = 20.0;
  int alpha_samples = 81;
  /// Golden-section / bisection iterations per stage boundary.
  int refine_iterations = 40;
  CountOptions count{};
};

struct ScenarioRecord {
  bool found = false;
  SystemParams base{0, 0, 1, 1, 0};
  std::vector<ScenarioStage> stages;  // (i) .. (iv)
  Fold fold{};
  double fold_alpha = 0.0;
  /// True when the fold is reached by increasing alpha from stage (iii).
  bool alpha_increasing = false;
  std::vector<std::string> trace;
};

class ScenarioNotFound : public NumericalError {
 public:
  ScenarioNotFound(const std::string& what, std::vector<std::string> trace)
      : NumericalError(what), trace(std::move(trace)) {}
  std::vector<std::string> trace;
};

/// Search for the parameter sequence: no cycles at alpha = beta = 0; one
/// unstable cycle around a stable anti-saddle for some beta < 0; two nested
/// cycles (inner unstable, outer stable) after increasing alpha; and the
/// multiplicity-two fold where they merge as alpha increases further.
/// alpha and beta of `base` are ignored. Throws ScenarioNotFound.
ScenarioRecord reproduce_two_cycle_scenario(const SystemParams& base,
                                            const ScenarioBudget& budget = {});

// ---------------------------------------------------------------------------
// Randomized audit

struct ParameterBox {
  double alpha_lo = 0.0, alpha_hi = 3.0;
  double beta_lo = -4.0, beta_hi = 2.0;
  double delta_lo = 0.05, delta_hi = 1.0;
  double lambda_lo = 0.1, lambda_hi = 1.0;
  double mu_lo = 0.0, mu_hi = 0.5;
};

/// Parameters of draw `index`; depends only on (seed, index).
SystemParams draw_parameters(const ParameterBox& box, std::uint64_t seed, int index);

struct DrawRecord {
  int index = 0;
  SystemParams params{0, 0, 1, 1, 0};
  int anti_saddles = 0;
  int max_nested = 0;
  bool reverified = false;
  std::string error;
};

struct AuditReport {
  std::uint64_t seed = 0;
  int draws = 0;
  int max_nested_cycles_observed = 0;
  std::vector<DrawRecord> violations;
  std::vector<DrawRecord> records;  // ordered by draw index
};

struct AuditOptions {
  CountOptions count{};
  /// Tolerances used to re-verify a draw with three or more cycles.
  double tight_rtol = 1e-12;
  int tight_n_scan = 400;
};

/// Counts nested cycles for each draw; draws are split across `workers`
/// threads and merged by draw index, so the report is independent of the
/// worker count.
AuditReport audit_max_cycles(const ParameterBox& box, int draws, std::uint64_t seed,
                             const AuditOptions& opts = {}, int workers = 1);

/// One audit record for fixed parameters (used for pinned draws).
DrawRecord audit_draw(const SystemParams& params, int index, const AuditOptions& opts = {});

}  // namespace holling
