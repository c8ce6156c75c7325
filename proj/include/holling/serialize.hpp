#pragma once

#include "holling/continuation.hpp"
#include "holling/equilibria.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace holling {

using Json = nlohmann::ordered_json;

/// Shortest decimal string that reads back to the same double; "nan", "inf"
/// and "-inf" for non-finite values.
std::string format_double(double v);

Json to_json(const SystemParams& p);
Json to_json(const Equilibrium& e);
Json to_json(const InfiniteEquilibrium& e);
Json to_json(const LimitCycle& c, bool with_orbit = false);
Json to_json(const Fold& f);
Json to_json(const Branch& b);
Json to_json(const ScenarioStage& s);
Json to_json(const ScenarioRecord& r);
Json to_json(const DrawRecord& r);
Json to_json(const AuditReport& r);

/// Two-space indented JSON followed by a newline.
std::string dump(const Json& j);

/// RFC-4180 quoting where needed.
std::string csv_field(const std::string& s);

std::string equilibria_csv(const std::vector<Equilibrium>& finite,
                           const std::vector<InfiniteEquilibrium>& infinite);

struct CycleRow {
  Vec2 anti_saddle;
  LimitCycle cycle;
};
std::string cycles_csv(const std::vector<CycleRow>& rows);

std::string branch_csv(const Branch& b);

// ---------------------------------------------------------------------------
// Phase portraits

struct Portrait {
  SystemParams params;
  /// Data window [x_min, x_max] x [y_min, y_max].
  Box window;
  std::vector<Equilibrium> equilibria;
  std::vector<std::vector<Vec2>> trajectories;
  std::vector<LimitCycle> cycles;
};

/// Self-contained SVG 1.1 document. Cycles are closed paths with class
/// "cycle", trajectories open polylines with class "trajectory", equilibria
/// glyphs with class "equilibrium" plus the kind.
std::string portrait_svg(const Portrait& p, int width = 640, int height = 640);

}  // namespace holling
