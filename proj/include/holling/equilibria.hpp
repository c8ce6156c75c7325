#pragma once

#include "holling/polynomial.hpp"
#include "holling/vectorfield.hpp"

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace holling {

enum class EquilibriumKind { saddle, node, focus, center_candidate, saddle_node, degenerate };

std::string_view to_string(EquilibriumKind k);

struct Equilibrium {
  PhasePoint location;
  std::array<std::complex<double>, 2> eigenvalues;
  EquilibriumKind kind;
  int index;  // Poincare index
  bool in_open_first_quadrant;
  double determinant;
  double trace;
  /// |det J| below the degeneracy threshold. Reported, never silently classified.
  bool degenerate;

  bool is_anti_saddle() const {
    return kind == EquilibriumKind::node || kind == EquilibriumKind::focus ||
           kind == EquilibriumKind::center_candidate;
  }
};

struct EquilibriumTolerances {
  double newton_residual = 1e-12;
  double dedup_radius = 1e-8;
  double degenerate_det = 1e-10;
  double imaginary_re = 1e-9;  // |Re l| < tol |l| => center candidate
};

/// Classify a point from the Jacobian of the (unrotated) field there.
Equilibrium classify(const SystemParams& params, const PhasePoint& location,
                     const EquilibriumTolerances& tol = {});

/// All real finite singular points of the gamma = 0 field (they coincide with
/// those of the rotated field), refined by damped Newton iteration and sorted
/// by (x, y). Degenerate points carry degenerate = true and an index computed
/// by a contour integral.
std::vector<Equilibrium> find_finite(const SystemParams& params,
                                     const EquilibriumTolerances& tol = {});

/// Univariate polynomial whose roots are the x-coordinates of the singular
/// points with x != 0, y != 0 (obtained by eliminating y).
Polynomial interior_elimination_polynomial(const SystemParams& params);

/// Winding number of the field along a circle, from N sampled angle
/// increments. Throws ContourThroughSingularity if the field (nearly)
/// vanishes at a sample and NonIntegerWinding if the pre-rounding residual is
/// >= 0.1.
int poincare_index(const SystemParams& params, const PhasePoint& center, double radius,
                   int samples = 1024);

/// Same contour computation for an arbitrary planar field given as a callable.
template <typename Field>
double winding_number(const Field& field, const Vec2& center, double radius, int samples,
                      double vanish_tol);

// ---------------------------------------------------------------------------
// Singular points at infinity

enum class InfiniteKind { node, saddle, degenerate };
std::string_view to_string(InfiniteKind k);

struct InfiniteEquilibrium {
  /// Either a finite slope u = y/x, or the ends of the y-axis.
  bool y_axis_ends = false;
  double slope = 0.0;
  int multiplicity = 1;
  InfiniteKind kind = InfiniteKind::degenerate;
  /// Index of each of the two antipodal points on the Poincare sphere.
  int index = 0;
  /// Eigenvalues of the linearization in the compactification chart.
  std::array<double, 2> chart_eigenvalues{0.0, 0.0};
  /// "linearization" when the chart Jacobian is nonsingular, "index" otherwise.
  std::string verified_by;
};

/// Compactified field data: the degree used and the chart polynomials whose
/// roots give the directions of the singular points at infinity.
struct Compactification {
  int degree;
  Bivariate P, Q;
  /// Q_d(1, u) - u P_d(1, u); roots are slopes u = y/x.
  Polynomial slope_polynomial;
  /// P_d(v, 1) - v Q_d(v, 1); a root at v = 0 means the y-axis ends are singular.
  Polynomial inverse_slope_polynomial;
};

/// P and Q of the gamma = 0 field built as bivariate polynomials by
/// multiplying out the factored form.
Compactification compactify(const SystemParams& params);

/// Generic analysis of the equator of the Poincare sphere for any valid
/// parameters (uses the actual degree of the field, so alpha = 0 is handled).
std::vector<InfiniteEquilibrium> analyze_infinity(const SystemParams& params);

class DegenerateAtInfinity : public NumericalError {
 public:
  DegenerateAtInfinity(const std::string& what, std::vector<InfiniteEquilibrium> merged)
      : NumericalError(what), merged(std::move(merged)) {}
  std::vector<InfiniteEquilibrium> merged;
};

/// The three singular points at infinity of the quartic field: a simple node
/// at the x-axis ends, a triple node at the y-axis ends and a simple saddle
/// in the direction y/x = lambda/mu. Requires mu > 0 (else throws
/// DegenerateAtInfinity carrying the merged structure). Kinds come from the
/// chart linearization or the chart index, not from the closed form.
std::vector<InfiniteEquilibrium> find_infinite(const SystemParams& params);

/// True when the computed structure equals {u=0 simple node, y-axis ends
/// triple node, u=lambda/mu simple saddle}.
bool matches_reference_structure(const SystemParams& params,
                                 const std::vector<InfiniteEquilibrium>& points);

// ---------------------------------------------------------------------------
// Index-theorem audits

enum class Isocline { x_axis, y_axis };

struct AlternationCheck {
  Isocline isocline;
  /// Singular points on the isocline ordered along it.
  std::vector<PhasePoint> points;
  /// Pairs (i, i+1) that were checked (not separated by a multiple point).
  int pairs_checked = 0;
  bool passed = true;
};

struct IndexAuditReport {
  int nodes = 0, foci = 0, centers = 0, saddles = 0;
  int nodes_at_infinity = 0, saddles_at_infinity = 0;
  int lhs = 0;  // N + N_f + N_c + N'
  int rhs = 0;  // C + C' + 1
  bool identity_holds = false;
  AlternationCheck alternation;
  bool passed = false;
};

/// Checks N + N_f + N_c + N' = C + C' + 1 over all real finite singular
/// points and all directions at infinity, plus saddle/anti-saddle alternation
/// along the chosen invariant isocline. Throws InconclusiveAudit when a point
/// is degenerate.
IndexAuditReport audit_index_theorems(const SystemParams& params,
                                      Isocline isocline = Isocline::x_axis);

/// Same audit on caller-supplied point sets (used to test the audit itself).
IndexAuditReport audit_index_theorems(const SystemParams& params,
                                      const std::vector<Equilibrium>& finite,
                                      const std::vector<InfiniteEquilibrium>& infinite,
                                      Isocline isocline = Isocline::x_axis);

/// First-quadrant structure: at most one interior point for beta >= 0, at
/// most two for beta < 0, and with two the left one is the anti-saddle.
struct QuadrantStructure {
  int interior_count = 0;
  bool count_ok = true;
  bool ordering_ok = true;
  bool ok() const { return count_ok && ordering_ok; }
};
QuadrantStructure check_first_quadrant(const SystemParams& params,
                                       const std::vector<Equilibrium>& finite);

// ---------------------------------------------------------------------------

template <typename Field>
double winding_number(const Field& field, const Vec2& center, double radius, int samples,
                      double vanish_tol) {
  const double two_pi = 2.0 * 3.14159265358979323846;
  auto sample = [&](int i) {
    const double th = two_pi * double(i) / double(samples);
    const Vec2 z = center + radius * Vec2(std::cos(th), std::sin(th));
    const Vec2 f = field(z);
    if (!(f.norm() > vanish_tol)) {
      throw ContourThroughSingularity("field vanishes on the index contour");
    }
    return f;
  };
  const Vec2 first = sample(0);
  Vec2 prev = first;
  double total = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const Vec2 cur = i == samples ? first : sample(i);
    total += std::atan2(wedge(prev, cur), prev.dot(cur));
    prev = cur;
  }
  return total / two_pi;
}

}  // namespace holling
