#include "holling/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace holling {

std::string_view to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::saddle: return "saddle";
    case EquilibriumKind::node: return "node";
    case EquilibriumKind::focus: return "focus";
    case EquilibriumKind::center_candidate: return "center-candidate";
    case EquilibriumKind::saddle_node: return "saddle-node";
    case EquilibriumKind::degenerate: return "degenerate";
  }
  return "?";
}

std::string_view to_string(InfiniteKind k) {
  switch (k) {
    case InfiniteKind::node: return "node";
    case InfiniteKind::saddle: return "saddle";
    case InfiniteKind::degenerate: return "degenerate";
  }
  return "?";
}

Equilibrium classify(const SystemParams& params, const PhasePoint& location,
                     const EquilibriumTolerances& tol) {
  const Mat2 J = eval_unrotated_jacobian(params.unrotated(), location);
  Equilibrium e;
  e.location = location;
  e.trace = J.trace();
  e.determinant = J.determinant();
  const double disc = e.trace * e.trace - 4.0 * e.determinant;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    e.eigenvalues = {std::complex<double>(0.5 * (e.trace - r), 0.0),
                     std::complex<double>(0.5 * (e.trace + r), 0.0)};
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    e.eigenvalues = {std::complex<double>(0.5 * e.trace, -im),
                     std::complex<double>(0.5 * e.trace, im)};
  }
  e.in_open_first_quadrant = location.x() > 0.0 && location.y() > 0.0;
  e.degenerate = std::abs(e.determinant) < tol.degenerate_det;
  if (e.degenerate) {
    e.kind = std::abs(e.trace) > tol.imaginary_re ? EquilibriumKind::saddle_node
                                                   : EquilibriumKind::degenerate;
    e.index = 0;  // filled in by a contour integral where possible
  } else if (e.determinant < 0.0) {
    e.kind = EquilibriumKind::saddle;
    e.index = -1;
  } else {
    e.index = 1;
    if (disc >= 0.0) {
      e.kind = EquilibriumKind::node;
    } else if (std::abs(0.5 * e.trace) < tol.imaginary_re * std::sqrt(e.determinant)) {
      e.kind = EquilibriumKind::center_candidate;
    } else {
      e.kind = EquilibriumKind::focus;
    }
  }
  return e;
}

Polynomial interior_elimination_polynomial(const SystemParams& p) {
  const Polynomial D{1.0, p.beta(), p.alpha()};
  const Polynomial X{0.0, 1.0};
  const Polynomial prey_growth{1.0, -p.lambda()};
  return D * (p.delta() * X + p.mu() * (prey_growth * D)) - X * X * X;
}

namespace {

double residual_bound(const Vec2& z) {
  const double r = z.norm();
  return 1e-10 * (1.0 + r * r * r * r);
}

// Damped Newton on the gamma = 0 field.
Vec2 refine(const SystemParams& p, Vec2 z, double tol) {
  Vec2 f = eval_unrotated(p, z);
  for (int it = 0; it < 100 && f.norm() > tol; ++it) {
    const Mat2 J = eval_unrotated_jacobian(p, z);
    const double det = J.determinant();
    if (!(std::abs(det) > 0.0)) break;
    const Vec2 step = J.inverse() * f;
    double damp = 1.0;
    Vec2 trial = z - step;
    Vec2 ft = eval_unrotated(p, trial);
    while (ft.norm() > f.norm() && damp > 1e-4) {
      damp *= 0.5;
      trial = z - damp * step;
      ft = eval_unrotated(p, trial);
    }
    if (ft.norm() >= f.norm() && damp <= 1e-4) break;
    z = trial;
    f = ft;
  }
  return z;
}

}  // namespace

std::vector<Equilibrium> find_finite(const SystemParams& params_in,
                                     const EquilibriumTolerances& tol) {
  const SystemParams p = params_in.unrotated();
  std::vector<Vec2> candidates;
  candidates.emplace_back(0.0, 0.0);
  if (p.mu() > 0.0) candidates.emplace_back(0.0, -p.delta() / p.mu());
  candidates.emplace_back(1.0 / p.lambda(), 0.0);
  for (double r : real_roots(Polynomial{1.0, p.beta(), p.alpha()})) candidates.emplace_back(r, 0.0);
  for (double x : real_roots(interior_elimination_polynomial(p))) {
    const double D = response_denominator(p, x);
    if (std::abs(x) < 1e-12 || std::abs(D) < 1e-14) continue;
    candidates.emplace_back(x, (1.0 - p.lambda() * x) * D / x);
  }

  std::vector<Vec2> points;
  for (const Vec2& c : candidates) {
    if (!is_finite(c)) continue;
    const Vec2 z = refine(p, c, tol.newton_residual);
    if (!is_finite(z) || eval_unrotated(p, z).norm() > residual_bound(z)) continue;
    const bool dup = std::any_of(points.begin(), points.end(), [&](const Vec2& q) {
      return (q - z).norm() <= tol.dedup_radius * (1.0 + z.norm());
    });
    if (!dup) points.push_back(z);
  }
  std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });

  std::vector<Equilibrium> out;
  for (const Vec2& z : points) {
    Equilibrium e = classify(p, z, tol);
    if (e.degenerate) {
      double sep = std::numeric_limits<double>::infinity();
      for (const Vec2& q : points)
        if (&q != &z) sep = std::min(sep, (q - z).norm());
      double r = std::min(0.25 * sep, 1e-2 * (1.0 + z.norm()));
      for (int attempt = 0; attempt < 6; ++attempt, r *= 0.5) {
        try {
          e.index = poincare_index(p, z, r, 4096);
          break;
        } catch (const NumericalError&) {
        }
      }
    }
    out.push_back(e);
  }
  return out;
}

int poincare_index(const SystemParams& params, const PhasePoint& center, double radius,
                   int samples) {
  if (!(radius > 0.0) || samples < 8) throw std::invalid_argument("poincare_index: bad contour");
  const double w = winding_number([&](const Vec2& z) { return eval_field(params, z); }, center,
                                  radius, samples, 1e-300);
  const double rounded = std::round(w);
  if (std::abs(w - rounded) >= 0.1) {
    throw NonIntegerWinding("winding number not close to an integer; increase samples",
                            std::abs(w - rounded));
  }
  return int(rounded);
}

// ---------------------------------------------------------------------------
// Infinity

Compactification compactify(const SystemParams& params) {
  const SystemParams p = params.unrotated();
  const Bivariate x = Bivariate::x(), y = Bivariate::y();
  const Bivariate one = Bivariate::constant(1.0);
  const Bivariate D = p.alpha() * (x * x) + p.beta() * x + one;
  Compactification c;
  c.P = x * ((one - p.lambda() * x) * D - x * y);
  c.Q = (-1.0 * y) * ((p.delta() * one + p.mu() * y) * D - x * x);
  c.degree = std::max(c.P.total_degree(), c.Q.total_degree());
  const int d = c.degree;

  Eigen::VectorXd s = Eigen::VectorXd::Zero(d + 2), t = Eigen::VectorXd::Zero(d + 2);
  for (int i = 0; i <= d; ++i) {
    const int j = d - i;
    // Q_d(1,u) - u P_d(1,u): monomial x^i y^j -> u^j
    s[j] += c.Q.coeff(i, j);
    s[j + 1] -= c.P.coeff(i, j);
    // P_d(v,1) - v Q_d(v,1): monomial x^i y^j -> v^i
    t[i] += c.P.coeff(i, j);
    t[i + 1] -= c.Q.coeff(i, j);
  }
  c.slope_polynomial = Polynomial(s);
  c.inverse_slope_polynomial = Polynomial(t);
  return c;
}

namespace {

// z^d F(1/z, u/z) as a polynomial in (u, z): x^i y^j -> u^j z^(d-i-j).
Bivariate chart_u(const Bivariate& F, int d) {
  Bivariate r(d);
  const auto& c = F.coefficients();
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      if (c(i, j) != 0.0) r.set(int(j), d - int(i + j), r.coeff(int(j), d - int(i + j)) + c(i, j));
  return r;
}

// z^d F(v/z, 1/z) as a polynomial in (v, z): x^i y^j -> v^i z^(d-i-j).
Bivariate chart_v(const Bivariate& F, int d) {
  Bivariate r(d);
  const auto& c = F.coefficients();
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      if (c(i, j) != 0.0) r.set(int(i), d - int(i + j), r.coeff(int(i), d - int(i + j)) + c(i, j));
  return r;
}

struct ChartField {
  Bivariate a, b;  // (da/dt, dz/dt) as polynomials in (w, z)
  Vec2 operator()(const Vec2& q) const { return {a(q.x(), q.y()), b(q.x(), q.y())}; }
  Mat2 jacobian(const Vec2& q) const {
    Mat2 J;
    J.row(0) = a.gradient(q.x(), q.y()).transpose();
    J.row(1) = b.gradient(q.x(), q.y()).transpose();
    return J;
  }
};

ChartField u_chart_field(const Compactification& c) {
  const Bivariate Pu = chart_u(c.P, c.degree), Qu = chart_u(c.Q, c.degree);
  const Bivariate u = Bivariate::x(), z = Bivariate::y();
  return {Qu - u * Pu, (-1.0 * z) * Pu};
}

ChartField v_chart_field(const Compactification& c) {
  const Bivariate Pv = chart_v(c.P, c.degree), Qv = chart_v(c.Q, c.degree);
  const Bivariate v = Bivariate::x(), z = Bivariate::y();
  return {Pv - v * Qv, (-1.0 * z) * Qv};
}

int root_multiplicity(const std::vector<std::complex<double>>& roots, double r0) {
  int m = 0;
  for (const auto& z : roots)
    if (std::abs(z - r0) <= 1e-4 * (1.0 + std::abs(r0))) ++m;
  return std::max(m, 1);
}

InfiniteEquilibrium classify_chart_point(const ChartField& f, double w0, double separation) {
  InfiniteEquilibrium e;
  const Vec2 q(w0, 0.0);
  const Mat2 J = f.jacobian(q);
  const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
  const double det = J.determinant();
  // z = 0 is invariant, so J is upper triangular there.
  e.chart_eigenvalues = {J(0, 0), J(1, 1)};
  if (std::abs(det) > 1e-10 * scale * scale) {
    e.index = det > 0.0 ? 1 : -1;
    e.kind = det > 0.0 ? InfiniteKind::node : InfiniteKind::saddle;
    e.verified_by = "linearization";
    return e;
  }
  double r = std::min(1e-2, 0.25 * separation);
  for (int attempt = 0; attempt < 8; ++attempt, r *= 0.5) {
    try {
      const double w = winding_number(f, q, r, 8192, 1e-300);
      if (std::abs(w - std::round(w)) < 0.1) {
        e.index = int(std::round(w));
        break;
      }
    } catch (const NumericalError&) {
    }
  }
  e.kind = e.index == 1 ? InfiniteKind::node
                        : (e.index == -1 ? InfiniteKind::saddle : InfiniteKind::degenerate);
  e.verified_by = "index";
  return e;
}

}  // namespace

std::vector<InfiniteEquilibrium> analyze_infinity(const SystemParams& params) {
  const Compactification c = compactify(params);
  const double smax = c.slope_polynomial.coefficients().cwiseAbs().maxCoeff();
  if (smax == 0.0) {
    throw DegenerateAtInfinity("every point at infinity is singular", {});
  }
  const auto slope_roots = polynomial_roots(c.slope_polynomial);
  std::vector<double> slopes;
  for (const auto& z : slope_roots) {
    if (std::abs(z.imag()) > 1e-6 * (1.0 + std::abs(z))) continue;
    const bool dup = std::any_of(slopes.begin(), slopes.end(), [&](double s) {
      return std::abs(s - z.real()) <= 1e-4 * (1.0 + std::abs(s));
    });
    if (!dup) slopes.push_back(z.real());
  }
  std::sort(slopes.begin(), slopes.end());

  const ChartField uf = u_chart_field(c);
  std::vector<InfiniteEquilibrium> out;
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    double sep = 1.0;
    for (std::size_t l = 0; l < slopes.size(); ++l)
      if (l != k) sep = std::min(sep, std::abs(slopes[l] - slopes[k]));
    InfiniteEquilibrium e = classify_chart_point(uf, slopes[k], sep);
    e.slope = slopes[k];
    e.multiplicity = root_multiplicity(slope_roots, slopes[k]);
    out.push_back(e);
  }

  const double t0 = c.inverse_slope_polynomial[0];
  const double tmax = c.inverse_slope_polynomial.coefficients().cwiseAbs().maxCoeff();
  if (std::abs(t0) <= 1e-14 * tmax) {
    const auto inv_roots = polynomial_roots(c.inverse_slope_polynomial);
    double sep = 1.0;
    for (const auto& z : inv_roots)
      if (std::abs(z) > 1e-4) sep = std::min(sep, std::abs(z));
    InfiniteEquilibrium e = classify_chart_point(v_chart_field(c), 0.0, sep);
    e.y_axis_ends = true;
    e.multiplicity = root_multiplicity(inv_roots, 0.0);
    out.push_back(e);
  }
  return out;
}

std::vector<InfiniteEquilibrium> find_infinite(const SystemParams& params) {
  if (params.mu() == 0.0) {
    throw DegenerateAtInfinity(
        "mu = 0: the saddle direction lambda/mu escapes to the y-axis ends, which merge with "
        "it",
        analyze_infinity(params));
  }
  return analyze_infinity(params);
}

bool matches_reference_structure(const SystemParams& params,
                                 const std::vector<InfiniteEquilibrium>& points) {
  if (params.mu() <= 0.0 || points.size() != 3) return false;
  const double u_saddle = params.lambda() / params.mu();
  bool node_x = false, node_y = false, saddle = false;
  for (const auto& e : points) {
    if (e.y_axis_ends) {
      node_y = e.multiplicity == 3 && e.kind == InfiniteKind::node;
    } else if (std::abs(e.slope) <= 1e-9) {
      node_x = e.multiplicity == 1 && e.kind == InfiniteKind::node;
    } else if (std::abs(e.slope - u_saddle) <= 1e-9 * (1.0 + u_saddle)) {
      saddle = e.multiplicity == 1 && e.kind == InfiniteKind::saddle;
    }
  }
  return node_x && node_y && saddle;
}

// ---------------------------------------------------------------------------
// Audits

namespace {

bool is_anti(const Equilibrium& e) { return e.is_anti_saddle(); }

AlternationCheck check_alternation(const SystemParams& p, const std::vector<Equilibrium>& finite,
                                   Isocline iso) {
  AlternationCheck chk;
  chk.isocline = iso;
  std::vector<const Equilibrium*> on;
  for (const auto& e : finite) {
    const bool hit = iso == Isocline::x_axis ? e.location.y() == 0.0 : e.location.x() == 0.0;
    if (hit) on.push_back(&e);
  }
  auto coord = [iso](const Equilibrium* e) {
    return iso == Isocline::x_axis ? e->location.x() : e->location.y();
  };
  std::sort(on.begin(), on.end(), [&](auto a, auto b) { return coord(a) < coord(b); });
  for (auto e : on) chk.points.push_back(e->location);

  // Multiple points of the isocline on this line: where it meets the other
  // branch of the same isocline. For y = 0 (part of Q = 0) that is
  // delta * D(x) = x^2; for x = 0 (part of P = 0) there are none.
  std::vector<double> multiple;
  if (iso == Isocline::x_axis) {
    multiple = real_roots(Polynomial{p.delta(), p.delta() * p.beta(), p.delta() * p.alpha() - 1.0});
  }
  for (std::size_t i = 0; i + 1 < on.size(); ++i) {
    const double a = coord(on[i]), b = coord(on[i + 1]);
    const bool separated = std::any_of(multiple.begin(), multiple.end(), [&](double m) {
      return m >= a - 1e-12 && m <= b + 1e-12;
    });
    if (separated) continue;
    ++chk.pairs_checked;
    const bool alt = (on[i]->kind == EquilibriumKind::saddle && is_anti(*on[i + 1])) ||
                     (is_anti(*on[i]) && on[i + 1]->kind == EquilibriumKind::saddle);
    if (!alt) chk.passed = false;
  }
  return chk;
}

}  // namespace

IndexAuditReport audit_index_theorems(const SystemParams& params, Isocline isocline) {
  const auto finite = find_finite(params);
  std::vector<InfiniteEquilibrium> infinite;
  try {
    infinite = analyze_infinity(params);
  } catch (const DegenerateAtInfinity& e) {
    throw InconclusiveAudit(std::string("infinity: ") + e.what());
  }
  return audit_index_theorems(params, finite, infinite, isocline);
}

IndexAuditReport audit_index_theorems(const SystemParams& params,
                                      const std::vector<Equilibrium>& finite,
                                      const std::vector<InfiniteEquilibrium>& infinite,
                                      Isocline isocline) {
  IndexAuditReport r;
  for (const auto& e : finite) {
    if (e.degenerate) throw InconclusiveAudit("degenerate finite singular point");
    switch (e.kind) {
      case EquilibriumKind::node: ++r.nodes; break;
      case EquilibriumKind::focus: ++r.foci; break;
      case EquilibriumKind::center_candidate: ++r.centers; break;
      case EquilibriumKind::saddle: ++r.saddles; break;
      default: throw InconclusiveAudit("unclassified finite singular point");
    }
  }
  for (const auto& e : infinite) {
    if (e.index > 0) r.nodes_at_infinity += e.index;
    if (e.index < 0) r.saddles_at_infinity -= e.index;
  }
  r.lhs = r.nodes + r.foci + r.centers + r.nodes_at_infinity;
  r.rhs = r.saddles + r.saddles_at_infinity + 1;
  r.identity_holds = r.lhs == r.rhs;
  r.alternation = check_alternation(params.unrotated(), finite, isocline);
  r.passed = r.identity_holds && r.alternation.passed;
  return r;
}

QuadrantStructure check_first_quadrant(const SystemParams& params,
                                       const std::vector<Equilibrium>& finite) {
  QuadrantStructure q;
  std::vector<const Equilibrium*> inside;
  for (const auto& e : finite)
    if (e.in_open_first_quadrant) inside.push_back(&e);
  q.interior_count = int(inside.size());
  q.count_ok = params.beta() >= 0.0 ? q.interior_count <= 1 : q.interior_count <= 2;
  if (inside.size() == 2 && !inside[0]->degenerate && !inside[1]->degenerate) {
    const auto* left = inside[0]->location.x() < inside[1]->location.x() ? inside[0] : inside[1];
    const auto* right = left == inside[0] ? inside[1] : inside[0];
    q.ordering_ok = left->is_anti_saddle() && right->kind == EquilibriumKind::saddle;
  }
  return q;
}

}  // namespace holling
