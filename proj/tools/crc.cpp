// crc: integrate R-circles, classify quadric maps, run verification suites.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical
// acceptance failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "crc/crc.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct CircleOptions {
  std::string config;
  bool demo = false;
  std::optional<double> x1, y1, x2, u_re, u_im, r, z, rho, t0, t1, step, tol;
  std::optional<std::string> output, format;
};

struct ClassifyOptions {
  std::string map;
  double theta = 1.0;
  double lambda = 2.0;
  double a_re = 0.5, a_im = -0.25, s = 0.3;
  double k = 1.5;
  int samples = crc::kMinClassifySamples;
  std::optional<std::uint64_t> seed;
  double tol = crc::kDefaultClassifyTol;
};

struct VerifyOptions {
  std::string suite = "all";
  int samples = 100;
  std::optional<std::uint64_t> seed;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  return flag ? *flag : crc::seed_from_env();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_trajectory(const crc::Trajectory& traj, crc::OutputFormat fmt, std::ostream& os) {
  switch (fmt) {
    case crc::OutputFormat::Csv: crc::write_trajectory_csv(os, traj); break;
    case crc::OutputFormat::Json: os << crc::trajectory_json(traj).dump(2) << '\n'; break;
    case crc::OutputFormat::Svg: crc::write_trajectory_svg(os, traj); break;
  }
}

void emit_trajectory(const crc::Trajectory& traj, crc::OutputFormat fmt, const std::string& output) {
  if (output == "-") {
    write_trajectory(traj, fmt, std::cout);
    return;
  }
  std::ofstream out(output);
  if (!out) throw std::invalid_argument("cannot write '" + output + "'");
  write_trajectory(traj, fmt, out);
}

// Closed-form circle on the quadric: r(0) = 1/2 under the speed profile
// |omega^1(gamma')| of the closed-form parametrisation, over t in [-1, 1].
int run_demo(const CircleOptions& o) {
  const crc::SectionFrame quadric = crc::quadric_frame();
  crc::CircleParams cp;
  cp.speed = crc::quadric_closed_form_speed;
  cp.t0 = -1.0;
  cp.t1 = 1.0;
  const crc::Trajectory traj = crc::integrate_circle_through(quadric, crc::quadric_golden_state(0.5), 0.0, cp);
  const double deviation = crc::max_closed_form_deviation(traj);

  crc::CircleParams stated;
  stated.rho = 2.0;
  stated.t0 = -1.0;
  stated.t1 = 1.0;
  const double stated_deviation =
      crc::max_closed_form_deviation(crc::integrate_circle_through(quadric, crc::quadric_golden_state(1.0), 0.0, stated));

  crc::Json out = {{"max_deviation", deviation},
                   {"t_range", {cp.t0, cp.t1}},
                   {"r0", 0.5},
                   {"rho", "2/sqrt(1+6t^2+t^4)"},
                   {"constant_rho2_r0_1_deviation", stated_deviation},
                   {"pass", deviation <= 1e-6}};
  std::cout << out.dump() << '\n';
  if (o.output) {
    emit_trajectory(traj, o.format ? crc::parse_format(*o.format) : crc::OutputFormat::Csv, *o.output);
  }
  return deviation <= 1e-6 ? kExitOk : kExitNumerical;
}

int run_circle(const CircleOptions& o) {
  if (o.demo) return run_demo(o);

  crc::RunConfig cfg;
  if (!o.config.empty()) crc::apply_config_json(cfg, crc::Json::parse(read_file(o.config)));
  crc::CircleState& s = cfg.initial;
  if (o.x1) s.p.x1 = *o.x1;
  if (o.y1) s.p.y1 = *o.y1;
  if (o.x2) s.p.x2 = *o.x2;
  if (o.u_re || o.u_im) s.u = {o.u_re.value_or(s.u.real()), o.u_im.value_or(s.u.imag())};
  if (o.r) s.r = *o.r;
  if (o.z) s.z = *o.z;
  if (o.rho) cfg.rho = *o.rho;
  if (o.t0) cfg.t0 = *o.t0;
  if (o.t1) cfg.t1 = *o.t1;
  if (o.step) cfg.step = *o.step;
  if (o.tol) cfg.tol = *o.tol;
  if (o.output) cfg.output = *o.output;
  if (o.format) cfg.format = crc::parse_format(*o.format);

  const crc::CircleParams cp = cfg.params();
  crc::validate(cfg.initial);
  crc::validate(cp);
  const crc::FrameRegistry frames;
  const crc::Trajectory traj = crc::integrate_circle(frames.get(cfg.model), cfg.initial, cp);
  emit_trajectory(traj, cfg.format, cfg.output);

  const double drift = traj.max_constraint_residual();
  if (drift > cp.tol) {
    std::cerr << "constraint drift " << drift << " exceeds tol " << cp.tol << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

crc::SmoothMap build_map(const ClassifyOptions& o) {
  namespace m = crc::maps;
  if (o.map == "identity") return m::identity();
  if (o.map == "rotation") return m::rotation(o.theta);
  if (o.map == "dilation") return m::dilation(o.lambda);
  if (o.map == "heis-translation") return m::heisenberg_translation({o.a_re, o.a_im}, o.s);
  if (o.map == "conjugation") return m::conjugation();
  if (o.map == "shear") return m::shear();
  if (o.map == "squeeze") return m::squeeze(o.k);
  throw std::invalid_argument("unknown map '" + o.map + "'");
}

int run_classify(const ClassifyOptions& o) {
  const crc::SmoothMap map = build_map(o);
  const crc::SectionFrame quadric = crc::quadric_frame();
  const crc::ClassificationReport rep = crc::classify(map, quadric, quadric, o.samples, resolve_seed(o.seed), o.tol);
  std::cout << crc::classification_json(rep).dump() << '\n';
  return kExitOk;
}

int run_verify(const VerifyOptions& o) {
  const std::uint64_t seed = resolve_seed(o.seed);
  const crc::SectionFrame quadric = crc::quadric_frame();
  std::vector<crc::ResidualReport> reports;
  const bool all = o.suite == "all";
  if (all || o.suite == "su21") reports.push_back(crc::su21_suite(o.samples, seed));
  if (all || o.suite == "structure") reports.push_back(crc::structure_suite(quadric, o.samples, seed));
  if (all || o.suite == "gauge") reports.push_back(crc::gauge_suite(o.samples, seed));
  if (all || o.suite == "flatness") {
    reports.push_back(crc::flatness_suite(quadric, o.samples, seed));
    reports.push_back(crc::fault_injection_suite(o.samples, seed));
  }
  bool pass = true;
  for (const auto& r : reports) {
    crc::write_report_json_lines(std::cout, r);
    pass = pass && r.pass();
  }
  return pass ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circle integrator and map classifier for 3-dimensional CR structures"};
  app.require_subcommand(1);

  CircleOptions circle;
  CLI::App* c = app.add_subcommand("circle", "integrate a circle on the quadric");
  c->add_option("--config", circle.config, "JSON run configuration");
  c->add_flag("--demo", circle.demo, "reproduce the closed-form quadric circle");
  c->add_option("--x1", circle.x1);
  c->add_option("--y1", circle.y1);
  c->add_option("--x2", circle.x2);
  c->add_option("--u-re", circle.u_re);
  c->add_option("--u-im", circle.u_im);
  c->add_option("--r", circle.r);
  c->add_option("--z", circle.z);
  c->add_option("--rho", circle.rho, "speed (required)");
  c->add_option("--t0", circle.t0);
  c->add_option("--t1", circle.t1);
  c->add_option("--step", circle.step);
  c->add_option("--tol", circle.tol);
  c->add_option("--output", circle.output, "output path, - for stdout");
  c->add_option("--format", circle.format, "csv|json|svg");

  ClassifyOptions classify;
  CLI::App* k = app.add_subcommand("classify", "classify a catalog map of the quadric");
  k->add_option("--map", classify.map, "identity|rotation|dilation|heis-translation|conjugation|shear|squeeze")
      ->required();
  k->add_option("--theta", classify.theta, "rotation angle");
  k->add_option("--lambda", classify.lambda, "dilation factor");
  k->add_option("--a-re", classify.a_re, "translation, Re a");
  k->add_option("--a-im", classify.a_im, "translation, Im a");
  k->add_option("--s", classify.s, "translation, x2 shift");
  k->add_option("--k", classify.k, "squeeze factor");
  k->add_option("--samples", classify.samples, "sample points (>= 10)");
  k->add_option("--seed", classify.seed);
  k->add_option("--tol", classify.tol);

  VerifyOptions verify;
  CLI::App* v = app.add_subcommand("verify", "run verification suites");
  v->add_option("suite", verify.suite, "su21|structure|gauge|flatness|all")
      ->check(CLI::IsMember({"su21", "structure", "gauge", "flatness", "all"}));
  v->add_option("--samples", verify.samples)->check(CLI::PositiveNumber);
  v->add_option("--seed", verify.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c) return run_circle(circle);
    if (*k) return run_classify(classify);
    if (*v) return run_verify(verify);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const crc::Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
