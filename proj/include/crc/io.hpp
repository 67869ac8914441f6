#pragma once

// Serialization: trajectories (CSV, JSON, SVG), residual reports (JSON lines),
// classification reports (JSON) and the circle run configuration.

#include <algorithm>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "crc/cartan_verify.hpp"
#include "crc/circles.hpp"
#include "crc/maps.hpp"
#include "json.hpp"

namespace crc {

using Json = nlohmann::json;

// Shortest round-trip decimal form.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline constexpr const char* kTrajectoryCsvHeader = "t,x1,y1,x2,u_re,u_im,r,z,res_omega,res_dir";

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << kTrajectoryCsvHeader << '\n';
  for (const auto& s : traj.samples) {
    const CircleState& st = s.state;
    const double row[] = {s.t, st.p.x1, st.p.y1, st.p.x2, st.u.real(), st.u.imag(), st.r, st.z,
                          s.residual.omega, s.residual.direction};
    for (std::size_t i = 0; i < std::size(row); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

inline Json trajectory_json(const Trajectory& traj) {
  Json samples = Json::array();
  for (const auto& s : traj.samples) {
    const CircleState& st = s.state;
    samples.push_back({{"t", s.t},
                       {"x1", st.p.x1},
                       {"y1", st.p.y1},
                       {"x2", st.p.x2},
                       {"u_re", st.u.real()},
                       {"u_im", st.u.imag()},
                       {"r", st.r},
                       {"z", st.z},
                       {"res_omega", s.residual.omega},
                       {"res_dir", s.residual.direction}});
  }
  return {{"samples", samples},
          {"metadata", {{"rho", traj.rho}, {"step", traj.step}, {"tol", traj.tol}, {"flags", traj.flags()}}}};
}

// (x1, x2) projection as a single path; x2 grows upwards.
inline void write_trajectory_svg(std::ostream& os, const Trajectory& traj) {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  if (!traj.samples.empty()) {
    xmin = xmax = traj.samples.front().state.p.x1;
    ymin = ymax = -traj.samples.front().state.p.x2;
  }
  for (const auto& s : traj.samples) {
    xmin = std::min(xmin, s.state.p.x1);
    xmax = std::max(xmax, s.state.p.x1);
    ymin = std::min(ymin, -s.state.p.x2);
    ymax = std::max(ymax, -s.state.p.x2);
  }
  const double extent = std::max({xmax - xmin, ymax - ymin, 1e-9});
  const double pad = 0.05 * extent;
  const double stroke = 0.005 * extent;

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_double(xmin - pad) << ' '
     << format_double(ymin - pad) << ' ' << format_double(xmax - xmin + 2 * pad) << ' '
     << format_double(ymax - ymin + 2 * pad) << "\">\n";
  os << "<path fill=\"none\" stroke=\"black\" stroke-width=\"" << format_double(stroke) << "\" d=\"";
  bool first = true;
  for (const auto& s : traj.samples) {
    os << (first ? "M" : " L") << format_double(s.state.p.x1) << ' ' << format_double(-s.state.p.x2);
    first = false;
  }
  os << "\"/>\n</svg>\n";
}

// One object per equation.
inline void write_report_json_lines(std::ostream& os, const ResidualReport& rep) {
  for (const EquationResidual& e : rep.equations()) {
    Json line = {{"suite", rep.suite()},
                 {"equation", e.equation},
                 {"samples", rep.samples()},
                 {"tol", rep.tol()},
                 {"pass", rep.passes(e)}};
    // JSON has no NaN.
    if (std::isfinite(e.max_residual)) {
      line["max_residual"] = e.max_residual;
    } else {
      line["max_residual"] = nullptr;
    }
    os << line.dump() << '\n';
  }
}

inline Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

inline Json classification_json(const ClassificationReport& rep) {
  Json ab = Json::array();
  for (const auto& s : rep.samples) {
    ab.push_back({{"p", {s.p.x1, s.p.y1, s.p.x2}},
                  {"alpha", complex_json(s.alpha)},
                  {"beta", complex_json(s.beta)},
                  {"c", complex_json(s.c)},
                  {"lambda", s.lambda}});
  }
  const auto [lo, hi] = rep.lambda_range();
  return {{"verdict", to_string(rep.verdict)},
          {"lambda_range", {lo, hi}},
          {"alpha_beta", ab},
          {"circle_residuals", rep.circle_residuals},
          {"tol", rep.tol},
          {"contact_tol", rep.contact_tol},
          {"contact_leak", rep.contact_leak},
          {"beta_ratio", rep.beta_ratio},
          {"alpha_ratio", rep.alpha_ratio},
          {"orientation_flip", rep.orientation_flip},
          {"inconsistent", rep.inconsistent}};
}

// ---------------------------------------------------------------------------
// Run configuration for circle integration
// ---------------------------------------------------------------------------

enum class OutputFormat { Csv, Json, Svg };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "svg") return OutputFormat::Svg;
  throw std::invalid_argument("unknown format '" + s + "' (csv|json|svg)");
}

struct RunConfig {
  std::string model = "quadric";
  CircleState initial{{0.0, -1.0, 0.0}, {1.0, 0.0}, 1.0, 0.0};
  std::optional<double> rho;
  double t0 = 0.0;
  double t1 = 1.0;
  double step = 1e-3;
  double tol = 1e-9;
  std::string output = "-";
  OutputFormat format = OutputFormat::Csv;

  CircleParams params() const {
    if (!rho) throw std::invalid_argument("rho is required");
    CircleParams cp;
    cp.rho = *rho;
    cp.t0 = t0;
    cp.t1 = t1;
    cp.step = step;
    cp.tol = tol;
    return cp;
  }
};

namespace detail {

inline void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(where + ": expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) throw std::invalid_argument(where + ": unknown key '" + item.key() + "'");
  }
}

inline double number(const Json& v, const std::string& key) {
  if (!v.is_number()) throw std::invalid_argument("config: '" + key + "' must be a number");
  return v.get<double>();
}

inline std::string text(const Json& v, const std::string& key) {
  if (!v.is_string()) throw std::invalid_argument("config: '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace detail

// Overlays the keys present in `j` onto `cfg`.
inline void apply_config_json(RunConfig& cfg, const Json& j) {
  detail::reject_unknown(j, {"model", "initial", "rho", "t0", "t1", "step", "tol", "output", "format"}, "config");
  if (j.contains("model")) {
    cfg.model = detail::text(j["model"], "model");
    if (cfg.model != "quadric") throw std::invalid_argument("config: unknown model '" + cfg.model + "'");
  }
  if (j.contains("initial")) {
    const Json& in = j["initial"];
    detail::reject_unknown(in, {"x1", "y1", "x2", "u_re", "u_im", "r", "z"}, "config.initial");
    auto get = [&](const char* key, double fallback) {
      return in.contains(key) ? detail::number(in[key], std::string("initial.") + key) : fallback;
    };
    CircleState& s = cfg.initial;
    s.p = {get("x1", s.p.x1), get("y1", s.p.y1), get("x2", s.p.x2)};
    s.u = {get("u_re", s.u.real()), get("u_im", s.u.imag())};
    s.r = get("r", s.r);
    s.z = get("z", s.z);
  }
  if (j.contains("rho")) cfg.rho = detail::number(j["rho"], "rho");
  if (j.contains("t0")) cfg.t0 = detail::number(j["t0"], "t0");
  if (j.contains("t1")) cfg.t1 = detail::number(j["t1"], "t1");
  if (j.contains("step")) cfg.step = detail::number(j["step"], "step");
  if (j.contains("tol")) cfg.tol = detail::number(j["tol"], "tol");
  if (j.contains("output")) cfg.output = detail::text(j["output"], "output");
  if (j.contains("format")) cfg.format = parse_format(detail::text(j["format"], "format"));
}

inline RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  apply_config_json(cfg, j);
  return cfg;
}

}  // namespace crc
