#include "holling/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace holling {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

Json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

Json point(const Vec2& z) { return Json::array({number(z.x()), number(z.y())}); }

}  // namespace

Json to_json(const SystemParams& p) {
  Json j;
  j["alpha"] = p.alpha();
  j["beta"] = p.beta();
  j["delta"] = p.delta();
  j["lambda"] = p.lambda();
  j["mu"] = p.mu();
  j["gamma"] = p.gamma();
  return j;
}

Json to_json(const Equilibrium& e) {
  Json j;
  j["x"] = number(e.location.x());
  j["y"] = number(e.location.y());
  j["kind"] = to_string(e.kind);
  j["index"] = e.index;
  j["eigenvalues"] = Json::array();
  for (const auto& l : e.eigenvalues) j["eigenvalues"].push_back(Json::array({l.real(), l.imag()}));
  j["determinant"] = number(e.determinant);
  j["trace"] = number(e.trace);
  j["in_open_first_quadrant"] = e.in_open_first_quadrant;
  j["degenerate"] = e.degenerate;
  return j;
}

Json to_json(const InfiniteEquilibrium& e) {
  Json j;
  if (e.y_axis_ends) {
    j["direction"] = "y-axis";
  } else {
    j["direction"] = "slope";
    j["slope"] = e.slope;
  }
  j["multiplicity"] = e.multiplicity;
  j["kind"] = to_string(e.kind);
  j["index"] = e.index;
  j["chart_eigenvalues"] = Json::array({e.chart_eigenvalues[0], e.chart_eigenvalues[1]});
  j["verified_by"] = e.verified_by;
  return j;
}

Json to_json(const LimitCycle& c, bool with_orbit) {
  Json j;
  j["s_star"] = number(c.s_star);
  j["point"] = point(c.point());
  j["section_anchor"] = point(c.section.anchor());
  j["section_direction"] = point(c.section.direction());
  j["period"] = number(c.period);
  j["stability"] = to_string(c.stability);
  j["d_s"] = number(c.d_s_value);
  j["multiplicity"] = c.multiplicity_estimate;
  j["multiplicity_capped"] = c.multiplicity_capped;
  j["orientation"] = c.orientation;
  j["closure_error"] = number(c.closure_error);
  if (with_orbit) {
    Json orbit = Json::array();
    for (const auto& s : c.orbit_samples) orbit.push_back(Json::array({s.t, s.z.x(), s.z.y()}));
    j["orbit"] = std::move(orbit);
  }
  return j;
}

Json to_json(const Fold& f) {
  Json j;
  j["parameter"] = number(f.parameter);
  j["s_star"] = number(f.s_star);
  j["multiplicity"] = f.multiplicity;
  j["multiplicity_capped"] = f.multiplicity_capped;
  j["cycles_before"] = f.cycles_before;
  j["cycles_after"] = f.cycles_after;
  return j;
}

Json to_json(const Branch& b) {
  Json j;
  j["parameter"] = b.parameter;
  Json pts = Json::array();
  for (const auto& p : b.points) {
    Json q;
    q["parameter"] = number(p.parameter);
    q["s_star"] = number(p.s_star);
    q["period"] = number(p.period);
    q["d_s"] = number(p.d_s);
    pts.push_back(std::move(q));
  }
  j["points"] = std::move(pts);
  j["folds"] = Json::array();
  for (const auto& f : b.folds) j["folds"].push_back(to_json(f));
  j["termination"] = to_string(b.termination);
  j["note"] = b.note;
  return j;
}

Json to_json(const ScenarioStage& s) {
  Json j;
  j["label"] = s.label;
  j["params"] = to_json(s.params);
  j["anti_saddle"] = point(s.anti_saddle);
  j["cycles"] = Json::array();
  for (const auto& c : s.cycles) j["cycles"].push_back(to_json(c));
  return j;
}

Json to_json(const ScenarioRecord& r) {
  Json j;
  j["found"] = r.found;
  j["base"] = Json{{"delta", r.base.delta()}, {"lambda", r.base.lambda()}, {"mu", r.base.mu()}};
  j["stages"] = Json::array();
  for (const auto& s : r.stages) j["stages"].push_back(to_json(s));
  j["fold_alpha"] = number(r.fold_alpha);
  j["alpha_increasing"] = r.alpha_increasing;
  j["fold"] = to_json(r.fold);
  j["trace"] = r.trace;
  return j;
}

Json to_json(const DrawRecord& r) {
  Json j;
  j["index"] = r.index;
  j["params"] = to_json(r.params);
  j["anti_saddles"] = r.anti_saddles;
  j["max_nested"] = r.max_nested;
  j["reverified"] = r.reverified;
  j["error"] = r.error;
  return j;
}

Json to_json(const AuditReport& r) {
  Json j;
  j["seed"] = r.seed;
  j["draws"] = r.draws;
  j["max_nested_cycles_observed"] = r.max_nested_cycles_observed;
  j["violations"] = Json::array();
  for (const auto& v : r.violations) j["violations"].push_back(to_json(v));
  j["records"] = Json::array();
  for (const auto& v : r.records) j["records"].push_back(to_json(v));
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string equilibria_csv(const std::vector<Equilibrium>& finite,
                           const std::vector<InfiniteEquilibrium>& infinite) {
  std::ostringstream os;
  os << "x,y,kind,index,re_eig1,im_eig1,re_eig2,im_eig2\r\n";
  for (const auto& e : finite) {
    os << format_double(e.location.x()) << ',' << format_double(e.location.y()) << ','
       << csv_field(std::string(to_string(e.kind))) << ',' << e.index;
    for (const auto& l : e.eigenvalues) os << ',' << format_double(l.real()) << ',' << format_double(l.imag());
    os << "\r\n";
  }
  // Points at infinity: (x, y) is the unit direction on the equator.
  for (const auto& e : infinite) {
    Vec2 dir = e.y_axis_ends ? Vec2(0.0, 1.0) : Vec2(1.0, e.slope).normalized();
    os << format_double(dir.x()) << ',' << format_double(dir.y()) << ",infinite-"
       << to_string(e.kind) << ',' << e.index << ',' << format_double(e.chart_eigenvalues[0])
       << ",0," << format_double(e.chart_eigenvalues[1]) << ",0\r\n";
  }
  return os.str();
}

std::string cycles_csv(const std::vector<CycleRow>& rows) {
  std::ostringstream os;
  os << "anti_saddle_x,anti_saddle_y,s_star,x,y,period,stability,multiplicity,d_s,"
        "closure_error\r\n";
  for (const auto& r : rows) {
    const auto& c = r.cycle;
    os << format_double(r.anti_saddle.x()) << ',' << format_double(r.anti_saddle.y()) << ','
       << format_double(c.s_star) << ',' << format_double(c.point().x()) << ','
       << format_double(c.point().y()) << ',' << format_double(c.period) << ','
       << to_string(c.stability) << ',' << (c.multiplicity_capped ? ">=3" : std::to_string(c.multiplicity_estimate))
       << ',' << format_double(c.d_s_value) << ',' << format_double(c.closure_error) << "\r\n";
  }
  return os.str();
}

std::string branch_csv(const Branch& b) {
  std::ostringstream os;
  os << "kind,parameter,s_star,period,d_s,multiplicity\r\n";
  for (const auto& p : b.points) {
    os << "point," << format_double(p.parameter) << ',' << format_double(p.s_star) << ','
       << format_double(p.period) << ',' << format_double(p.d_s) << ",\r\n";
  }
  for (const auto& f : b.folds) {
    os << "fold," << format_double(f.parameter) << ',' << format_double(f.s_star) << ",,0,"
       << (f.multiplicity_capped ? ">=3" : std::to_string(f.multiplicity)) << "\r\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

struct Frame {
  Box w;
  double width, height, margin;
  double px(double x) const { return margin + (x - w.x_min) / (w.x_max - w.x_min) * (width - 2 * margin); }
  double py(double y) const {
    return height - margin - (y - w.y_min) / (w.y_max - w.y_min) * (height - 2 * margin);
  }
};

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string path_data(const Frame& f, const std::vector<Vec2>& pts, bool closed) {
  std::string d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    d += i == 0 ? "M" : " L";
    d += coord(f.px(pts[i].x())) + "," + coord(f.py(pts[i].y()));
  }
  if (closed) d += " Z";
  return d;
}

}  // namespace

std::string portrait_svg(const Portrait& p, int width, int height) {
  const Frame f{p.window, double(width), double(height), 40.0};
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<title>alpha=" << format_double(p.params.alpha()) << " beta=" << format_double(p.params.beta())
     << " delta=" << format_double(p.params.delta()) << " lambda=" << format_double(p.params.lambda())
     << " mu=" << format_double(p.params.mu()) << " gamma=" << format_double(p.params.gamma())
     << "</title>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n";
  os << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
     << "<line x1=\"" << coord(f.px(p.window.x_min)) << "\" y1=\"" << coord(f.py(0.0)) << "\" x2=\""
     << coord(f.px(p.window.x_max)) << "\" y2=\"" << coord(f.py(0.0)) << "\"/>\n"
     << "<line x1=\"" << coord(f.px(0.0)) << "\" y1=\"" << coord(f.py(p.window.y_min)) << "\" x2=\""
     << coord(f.px(0.0)) << "\" y2=\"" << coord(f.py(p.window.y_max)) << "\"/>\n"
     << "<text x=\"" << coord(f.px(p.window.x_max)) << "\" y=\"" << coord(f.py(0.0) + 16)
     << "\" font-size=\"12\" text-anchor=\"end\">x " << format_double(p.window.x_max) << "</text>\n"
     << "<text x=\"" << coord(f.px(0.0) + 4) << "\" y=\"" << coord(f.py(p.window.y_max) + 12)
     << "\" font-size=\"12\">y " << format_double(p.window.y_max) << "</text>\n"
     << "</g>\n";

  os << "<g class=\"trajectories\" fill=\"none\" stroke=\"#8899aa\" stroke-width=\"0.8\">\n";
  for (const auto& t : p.trajectories) {
    if (t.size() < 2) continue;
    os << "<path class=\"trajectory\" d=\"" << path_data(f, t, false) << "\"/>\n";
  }
  os << "</g>\n";

  os << "<g class=\"cycles\" fill=\"none\" stroke-width=\"2\">\n";
  for (const auto& c : p.cycles) {
    std::vector<Vec2> pts;
    pts.reserve(c.orbit_samples.size());
    for (const auto& s : c.orbit_samples) pts.push_back(s.z);
    if (pts.size() > 1) pts.pop_back();
    const char* colour = c.stability == Stability::stable     ? "#1f77b4"
                         : c.stability == Stability::unstable ? "#d62728"
                                                              : "#9467bd";
    os << "<path class=\"cycle " << to_string(c.stability) << "\" stroke=\"" << colour
       << "\" d=\"" << path_data(f, pts, true) << "\"/>\n";
  }
  os << "</g>\n";

  os << "<g class=\"equilibria\">\n";
  for (const auto& e : p.equilibria) {
    if (!p.window.contains(e.location)) continue;
    const double x = f.px(e.location.x()), y = f.py(e.location.y());
    const std::string cls = "equilibrium " + std::string(to_string(e.kind)) +
                            (e.is_anti_saddle() ? " anti-saddle" : "") +
                            (e.in_open_first_quadrant ? " interior" : "");
    if (e.kind == EquilibriumKind::saddle) {
      os << "<path class=\"" << cls << "\" stroke=\"black\" stroke-width=\"2\" d=\"M"
         << coord(x - 5) << ',' << coord(y - 5) << " L" << coord(x + 5) << ',' << coord(y + 5)
         << " M" << coord(x - 5) << ',' << coord(y + 5) << " L" << coord(x + 5) << ','
         << coord(y - 5) << "\"/>\n";
    } else {
      const bool stable = e.trace < 0.0;
      os << "<circle class=\"" << cls << "\" cx=\"" << coord(x) << "\" cy=\"" << coord(y)
         << "\" r=\"5\" stroke=\"black\" fill=\"" << (stable ? "black" : "white") << "\"/>\n";
    }
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace holling
