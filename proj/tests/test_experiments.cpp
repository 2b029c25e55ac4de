#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <linest/distribution.hpp>
#include <linest/experiments.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace linest;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream is(path);
  REQUIRE_MESSAGE(bool(is), ("cannot open " + path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

std::vector<double> split_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

TEST_CASE("distribution parsing") {
  CHECK(variance(parse_distribution("gaussian(2)")) == doctest::Approx(2.0));
  CHECK(variance(parse_distribution("uniform(0.5)")) ==
        doctest::Approx(0.25 / 3.0));
  CHECK(variance(parse_distribution("laplace(3)")) == doctest::Approx(3.0));
  CHECK(variance(parse_distribution("triangular(1.5)")) ==
        doctest::Approx(1.5));
  CHECK(family_name(parse_distribution("triangular(1)")) == "triangular");
  for (const char* bad : {"gauss(1)", "gaussian", "gaussian(-1)", "gaussian(0)",
                          "gaussian(x)", "gaussian(1)tail", "(1)", "uniform()"}) {
    CHECK_THROWS_AS(parse_distribution(bad), ConfigError);
  }
}

TEST_CASE("configuration validation") {
  ExperimentConfig cfg;
  cfg.theta_count = 4;
  CHECK_THROWS_AS(run_example2(cfg), ConfigError);

  ExperimentConfig neg;
  neg.gammas = {1.0, -2.0};
  CHECK_THROWS_AS(run_example1(neg), ConfigError);

  ExperimentConfig step;
  step.step = -0.1;
  CHECK_THROWS_AS(run_example1(step), ConfigError);

  ExperimentConfig three;
  three.gammas = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(run_two_snr(three), ConfigError);

  ExperimentConfig banana;
  banana.source_spec = "banana(1)";
  CHECK_THROWS_AS(run_example1(banana), ConfigError);
}

TEST_CASE("example1 writes a sweep and one curve per gamma") {
  ExperimentConfig cfg;
  cfg.gammas = {1.0};
  cfg.source_spec = "uniform(1)";
  cfg.noise_spec = "uniform(1)";
  cfg.out_prefix = "t_e1";
  const auto files = run_example1(cfg);
  REQUIRE(files.size() == 2);
  CHECK(files[0] == "t_e1_sweep.csv");
  CHECK(files[1] == "t_e1_curve_gamma1.csv");

  const auto sweep = read_lines(files[0]);
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[0] ==
        "# config: experiment=example1 source=uniform(1) noise=uniform(1) "
        "gammas=1 step=0.01 out=t_e1");
  CHECK(sweep[1] == "gamma,gap,fitted_slope,k_mse,risk_opt,risk_lin");
  const auto row = split_row(sweep[2]);
  REQUIRE(row.size() == 6);
  CHECK(row[0] == doctest::Approx(1.0));
  CHECK(row[1] < 1e-9);                       // identical laws: no gap
  CHECK(row[3] == doctest::Approx(0.5));      // k = gamma/(gamma+1)

  const auto curve = read_lines(files[1]);
  CHECK(curve[1] == "y,h_opt,h_lin");
  bool checked = false;
  for (std::size_t i = 2; i < curve.size(); i += 40) {
    const auto r = split_row(curve[i]);
    REQUIRE(r.size() == 3);
    CHECK(r[2] == doctest::Approx(0.5 * r[0]).epsilon(1e-9));
    if (std::abs(r[0]) < 1.5) {  // inside the observable range
      CHECK(r[1] == doctest::Approx(r[2]).epsilon(1e-5));
      checked = true;
    }
  }
  CHECK(checked);
}

TEST_CASE("match writes candidate and verdict, tagged only for several gammas") {
  ExperimentConfig cfg;
  cfg.out_prefix = "t_match";
  const auto files = run_match(cfg);  // defaults: uniform(1) noise, gamma = 2
  REQUIRE(files.size() == 2);
  CHECK(files[0] == "t_match_candidate.csv");
  CHECK(files[1] == "t_match_verdict.json");
  const auto cand = read_lines(files[0]);
  CHECK(cand[0].rfind("# config: experiment=match ", 0) == 0);
  CHECK(cand[1] == "x,f_candidate");
  const auto verdict = read_lines(files[1]);
  REQUIRE(verdict.size() == 1);
  CHECK(verdict[0].find("\"verdict\":\"Valid\"") != std::string::npos);

  ExperimentConfig multi;
  multi.gammas = {1.0, 3.0};
  multi.out_prefix = "t_match2";
  const auto tagged = run_match(multi);
  REQUIRE(tagged.size() == 4);
  CHECK(tagged[0] == "t_match2_candidate_gamma1.csv");
  CHECK(tagged[1] == "t_match2_verdict_gamma1.json");
  CHECK(tagged[2] == "t_match2_candidate_gamma3.csv");
  CHECK(tagged[3] == "t_match2_verdict_gamma3.json");
}

TEST_CASE("moments table lists noise and recursed source moments") {
  ExperimentConfig cfg;
  cfg.out_prefix = "t_mom";
  const auto files = run_moments(cfg);  // defaults: uniform(1) noise, gamma = 2
  REQUIRE(files.size() == 1);
  const auto lines = read_lines(files[0]);
  REQUIRE(lines.size() == 7);  // config + header + orders 1..5
  CHECK(lines[1] == "order,noise_moment,source_moment");
  const auto second = split_row(lines[3]);
  CHECK(second[0] == doctest::Approx(2.0));
  CHECK(second[1] == doctest::Approx(1.0 / 3.0));
  CHECK(second[2] == doctest::Approx(2.0 / 3.0));
  const auto fourth = split_row(lines[5]);
  CHECK(fourth[1] == doctest::Approx(0.2));
  CHECK(fourth[2] == doctest::Approx(16.0 / 15.0));
}

TEST_CASE("lp-check reports near-zero residuals for gaussian pairs") {
  ExperimentConfig cfg;
  cfg.out_prefix = "t_lp";
  const auto files = run_lp_check(cfg);  // defaults: gaussian pair, 3 gammas
  const auto lines = read_lines(files[0]);
  REQUIRE(lines.size() == 8);  // config + header + 3 gammas x 2 norms
  CHECK(lines[1] == "gamma,p,k,residual");
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto r = split_row(lines[i]);
    REQUIRE(r.size() == 4);
    const double gamma = r[0];
    CHECK((r[1] == 2.0 || r[1] == 4.0));
    CHECK(r[2] == doctest::Approx(gamma / (gamma + 1.0)).epsilon(1e-3));
    CHECK(r[3] < 1e-3);
  }
}

TEST_CASE("two-snr emits one gap per ratio") {
  ExperimentConfig cfg;
  cfg.out_prefix = "t_snr";
  const auto files = run_two_snr(cfg);  // defaults: triangular/uniform, 2 and 8
  const auto lines = read_lines(files[0]);
  REQUIRE(lines.size() == 4);
  CHECK(lines[1] == "gamma,gap");
  const auto r2 = split_row(lines[2]);
  const auto r8 = split_row(lines[3]);
  CHECK(r2[0] == doctest::Approx(2.0));
  CHECK(r2[1] < 1e-6);
  CHECK(r8[0] == doctest::Approx(8.0));
  CHECK(r8[1] == doctest::Approx(8.637717e-3).epsilon(1e-2));
}

TEST_CASE("example2 sweeps the givens angle") {
  ExperimentConfig cfg;
  cfg.theta_count = 8;
  cfg.out_prefix = "t_e2";
  const auto files = run_example2(cfg);
  REQUIRE(files.size() == 1);
  CHECK(files[0] == "t_e2_givens.csv");
  const auto lines = read_lines(files[0]);
  REQUIRE(lines.size() == 10);  // config + header + 8 angles
  CHECK(lines[0].find(" theta_count=8 ") != std::string::npos);
  CHECK(lines[0].find("experiment=example2") != std::string::npos);
  CHECK(lines[1] == "theta,gap_normalized,mse_opt,mse_lin");
  const auto row0 = split_row(lines[2]);   // theta = 0
  const auto row1 = split_row(lines[3]);   // theta = pi/4
  CHECK(row0[0] == doctest::Approx(0.0));
  CHECK(row1[0] == doctest::Approx(3.14159265 / 4.0).epsilon(1e-6));
  CHECK(row0[1] < 1e-3);
  CHECK(row1[1] > 5e-3);
  for (std::size_t i = 2; i < lines.size(); ++i)
    CHECK(split_row(lines[i])[3] == doctest::Approx(4.0 / 9.0).epsilon(1e-9));
}
