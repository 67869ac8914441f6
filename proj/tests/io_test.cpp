#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <regex>
#include <sstream>

#include "crc/io.hpp"

using crc::Json;

namespace {

const crc::SectionFrame kQuadric = crc::quadric_frame();

crc::Trajectory short_run() {
  crc::CircleParams cp;
  cp.rho = 2.0;
  cp.t0 = 0.0;
  cp.t1 = 0.01;
  return crc::integrate_circle(kQuadric, {{0.0, -1.0, 0.0}, {1.0, 0.0}, 1.0, 0.0}, cp);
}

std::string csv(const crc::Trajectory& traj) {
  std::ostringstream os;
  crc::write_trajectory_csv(os, traj);
  return os.str();
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  for (double x : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0}) {
    EXPECT_EQ(std::stod(crc::format_double(x)), x);
  }
}

TEST(Csv, HeaderAndShape) {
  const crc::Trajectory traj = short_run();
  const std::string out = csv(traj);
  EXPECT_EQ(out.substr(0, out.find('\n')), "t,x1,y1,x2,u_re,u_im,r,z,res_omega,res_dir");
  EXPECT_EQ(count(out, "\n"), traj.samples.size() + 1);
  std::istringstream is(out);
  std::string line;
  std::getline(is, line);
  std::getline(is, line);
  EXPECT_EQ(count(line, ","), 9u);
  EXPECT_EQ(line.substr(0, 2), "0,");
}

TEST(Csv, BitStable) { EXPECT_EQ(csv(short_run()), csv(short_run())); }

TEST(Json, TrajectoryMetadata) {
  crc::Trajectory traj = short_run();
  const Json j = crc::trajectory_json(traj);
  ASSERT_EQ(j["samples"].size(), traj.samples.size());
  EXPECT_EQ(j["samples"][0]["y1"].get<double>(), -1.0);
  EXPECT_EQ(j["metadata"]["rho"].get<double>(), 2.0);
  EXPECT_EQ(j["metadata"]["step"].get<double>(), 1e-3);
  EXPECT_EQ(j["metadata"]["tol"].get<double>(), 1e-9);
  EXPECT_TRUE(j["metadata"]["flags"].is_array());
  EXPECT_TRUE(j["metadata"]["flags"].empty());

  traj.r_nonpositive = true;
  const Json flagged = crc::trajectory_json(traj);
  EXPECT_EQ(flagged["metadata"]["flags"][0], "r_nonpositive");
}

TEST(Svg, SinglePathWithViewBox) {
  std::ostringstream os;
  crc::write_trajectory_svg(os, short_run());
  const std::string svg = os.str();
  EXPECT_EQ(count(svg, "<path"), 1u);
  EXPECT_EQ(count(svg, "viewBox="), 1u);
  EXPECT_EQ(count(svg, "M"), 1u);
  EXPECT_TRUE(std::regex_search(svg, std::regex("viewBox=\"[-0-9.e]+ [-0-9.e]+ [0-9.e]+ [0-9.e]+\"")));
}

TEST(ReportLines, OneObjectPerEquation) {
  crc::ResidualReport rep("demo", 1e-6);
  rep.record("a", 1e-8);
  rep.record("b", std::numeric_limits<double>::quiet_NaN());
  rep.add_samples(3);
  std::ostringstream os;
  crc::write_report_json_lines(os, rep);
  std::istringstream is(os.str());
  std::string line;
  std::vector<Json> rows;
  while (std::getline(is, line)) rows.push_back(Json::parse(line));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0]["suite"], "demo");
  EXPECT_EQ(rows[0]["equation"], "a");
  EXPECT_EQ(rows[0]["samples"], 3);
  EXPECT_EQ(rows[0]["pass"], true);
  EXPECT_EQ(rows[0]["max_residual"].get<double>(), 1e-8);
  EXPECT_TRUE(rows[1]["max_residual"].is_null());
  EXPECT_EQ(rows[1]["pass"], false);
}

TEST(ClassificationJson, Keys) {
  const Json j = crc::classification_json(crc::classify(crc::maps::conjugation(), kQuadric, kQuadric));
  for (const char* key : {"verdict", "lambda_range", "alpha_beta", "circle_residuals", "tol", "contact_tol",
                          "contact_leak", "beta_ratio", "alpha_ratio", "orientation_flip", "inconsistent"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["verdict"], "ConjugateCR");
  ASSERT_EQ(j["alpha_beta"].size(), 10u);
  EXPECT_EQ(j["alpha_beta"][0]["alpha"].size(), 2u);
  EXPECT_NEAR(j["lambda_range"][0].get<double>(), -1.0, 1e-12);
}

TEST(RunConfig, Parses) {
  const crc::RunConfig cfg = crc::parse_run_config(
      R"({"model": "quadric", "initial": {"x1": 0.5, "u_im": 1.0, "u_re": 0.0}, "rho": 3, "t1": 2, "format": "json"})");
  EXPECT_EQ(cfg.initial.p.x1, 0.5);
  EXPECT_EQ(cfg.initial.p.y1, -1.0);
  EXPECT_EQ(cfg.initial.u, crc::Complex(0.0, 1.0));
  EXPECT_EQ(cfg.params().rho, 3.0);
  EXPECT_EQ(cfg.params().t1, 2.0);
  EXPECT_EQ(cfg.format, crc::OutputFormat::Json);
}

TEST(RunConfig, Rejects) {
  EXPECT_THROW(crc::parse_run_config(R"({"rho": 1, "colour": "red"})"), std::invalid_argument);
  EXPECT_THROW(crc::parse_run_config(R"({"initial": {"w": 1}})"), std::invalid_argument);
  EXPECT_THROW(crc::parse_run_config(R"({"model": "sphere"})"), std::invalid_argument);
  EXPECT_THROW(crc::parse_run_config(R"({"rho": "fast"})"), std::invalid_argument);
  EXPECT_THROW(crc::parse_run_config("{not json"), std::invalid_argument);
  EXPECT_THROW(crc::parse_run_config(R"({"format": "png"})"), std::invalid_argument);
  EXPECT_THROW(crc::parse_run_config("{}").params(), std::invalid_argument);
}
