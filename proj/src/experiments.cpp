#include "linest/experiments.hpp"

#include "linest/estimation.hpp"
#include "linest/matching.hpp"
#include "linest/spectral.hpp"
#include "linest/vector_case.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace linest {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Resolved {
  ExperimentConfig cfg;
  Distribution source;
  Distribution noise;
};

Resolved resolve(const char* name, const ExperimentConfig& in,
                 const char* source_default, const char* noise_default,
                 std::vector<double> gammas_default, double step_default) {
  Resolved r;
  r.cfg = in;
  r.cfg.experiment = name;
  if (r.cfg.source_spec.empty()) r.cfg.source_spec = source_default;
  if (r.cfg.noise_spec.empty()) r.cfg.noise_spec = noise_default;
  if (r.cfg.gammas.empty()) r.cfg.gammas = std::move(gammas_default);
  if (r.cfg.step == 0.0) r.cfg.step = step_default;
  if (!(r.cfg.step > 0.0)) throw ConfigError("step must be positive");
  if (r.cfg.gammas.empty()) throw ConfigError("at least one gamma value is required");
  for (const double g : r.cfg.gammas)
    if (!(g > 0.0) || !std::isfinite(g))
      throw ConfigError("gamma values must be positive and finite");
  r.source = parse_distribution(r.cfg.source_spec);
  r.noise = parse_distribution(r.cfg.noise_spec);
  return r;
}

std::string config_line(const Resolved& r) {
  std::string gammas;
  for (std::size_t i = 0; i < r.cfg.gammas.size(); ++i)
    gammas += (i ? "," : "") + format_value(r.cfg.gammas[i]);
  std::string line = "# config: experiment=" + r.cfg.experiment +
                     " source=" + r.cfg.source_spec + " noise=" + r.cfg.noise_spec +
                     " gammas=" + gammas + " step=" + format_value(r.cfg.step);
  if (r.cfg.experiment == "example2")
    line += " theta_count=" + std::to_string(r.cfg.theta_count);
  line += " out=" + r.cfg.out_prefix;
  return line;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

std::string gamma_tag(double g) { return "gamma" + format_value(g); }

}  // namespace

Distribution parse_distribution(const std::string& spec) {
  const std::size_t open = spec.find('(');
  if (open == std::string::npos || spec.back() != ')')
    throw ConfigError("distribution spec must look like family(parameter): " + spec);
  const std::string family = spec.substr(0, open);
  const std::string num = spec.substr(open + 1, spec.size() - open - 2);
  char* end = nullptr;
  const double p = std::strtod(num.c_str(), &end);
  if (end == num.c_str() || *end != '\0' || !(p > 0.0) || !std::isfinite(p))
    throw ConfigError("distribution parameter must be a positive number: " + spec);
  if (family == "gaussian") return Gaussian{p};
  if (family == "uniform") return Uniform{p};
  if (family == "laplace") return Laplace{p};
  if (family == "triangular") return Triangular{p};
  throw ConfigError("unknown distribution family: " + family);
}

std::vector<std::string> run_example1(const ExperimentConfig& cfg) {
  const Resolved r = resolve("example1", cfg, "gaussian(1)", "uniform(1)", {0.1, 1.0, 10.0}, 0.01);
  std::vector<std::string> files;

  const std::string sweep_path = r.cfg.out_prefix + "_sweep.csv";
  std::ofstream sweep = open_out(sweep_path);
  sweep << config_line(r) << "\n";
  sweep << "gamma,gap,fitted_slope,k_mse,risk_opt,risk_lin\n";
  for (const SweepRow& row : snr_sweep(r.source, r.noise, r.cfg.gammas))
    sweep << format_value(row.gamma) << ',' << format_value(row.gap) << ','
          << format_value(row.fitted_slope) << ',' << format_value(row.k_mse) << ','
          << format_value(row.risk_opt) << ',' << format_value(row.risk_lin) << '\n';
  files.push_back(sweep_path);

  for (const double g : r.cfg.gammas) {
    const Problem p{r.source, noise_for_snr(r.noise, r.source, g)};
    const GridSpec grid = default_y_grid(p, r.cfg.step);
    const Estimator h = optimal_estimator(p, grid);
    const double k = linear_coefficient_mse(p.gamma());
    const std::string path = r.cfg.out_prefix + "_curve_" + gamma_tag(g) + ".csv";
    std::ofstream os = open_out(path);
    os << config_line(r) << "\n";
    os << "y,h_opt,h_lin\n";
    for (std::size_t j = 0; j < grid.count; ++j) {
      const double y = grid.at(j);
      os << format_value(y) << ',' << format_value(h.h[j]) << ',' << format_value(k * y)
         << '\n';
    }
    files.push_back(path);
  }
  return files;
}

std::vector<std::string> run_example2(const ExperimentConfig& cfg) {
  const Resolved r = resolve("example2", cfg, "triangular(1)", "uniform(1)", {2.0}, 0.02);
  if (r.cfg.theta_count < 8)
    throw ConfigError("theta-count must be at least 8 to resolve the gap zeros");
  std::vector<double> thetas(static_cast<std::size_t>(r.cfg.theta_count));
  for (int i = 0; i < r.cfg.theta_count; ++i)
    thetas[static_cast<std::size_t>(i)] =
        2.0 * kPi * static_cast<double>(i) / static_cast<double>(r.cfg.theta_count);

  const std::string path = r.cfg.out_prefix + "_givens.csv";
  std::ofstream os = open_out(path);
  os << config_line(r) << "\n";
  os << "theta,gap_normalized,mse_opt,mse_lin\n";
  for (const GivensRow& row : givens_sweep(r.source, r.noise, thetas))
    os << format_value(row.theta) << ',' << format_value(row.gap) << ','
       << format_value(row.mse_opt) << ',' << format_value(row.mse_lin) << '\n';
  return {path};
}

std::vector<std::string> run_match(const ExperimentConfig& cfg) {
  const Resolved r = resolve("match", cfg, "gaussian(1)", "uniform(1)", {2.0}, 0.01);
  std::vector<std::string> files;
  const bool tagged = r.cfg.gammas.size() > 1;
  for (const double g : r.cfg.gammas) {
    const MatchResult m = match_source(r.noise, g);
    const std::string tag = tagged ? "_" + gamma_tag(g) : "";
    const std::string cand_path = r.cfg.out_prefix + "_candidate" + tag + ".csv";
    std::ofstream cand = open_out(cand_path);
    cand << config_line(r) << "\n";
    write_csv(m, cand);
    files.push_back(cand_path);

    const std::string verdict_path = r.cfg.out_prefix + "_verdict" + tag + ".json";
    std::ofstream vj = open_out(verdict_path);
    vj << verdict_json(m) << "\n";
    files.push_back(verdict_path);
  }
  return files;
}

std::vector<std::string> run_moments(const ExperimentConfig& cfg) {
  const Resolved r = resolve("moments", cfg, "gaussian(1)", "uniform(1)", {2.0}, 0.01);
  const int m_max = 4;
  const std::string path = r.cfg.out_prefix + "_moments.csv";
  std::ofstream os = open_out(path);
  os << config_line(r) << "\n";
  os << "order,noise_moment,source_moment\n";
  const MomentSequence nz = moment_sequence(r.noise, m_max + 1);
  for (const double g : r.cfg.gammas) {
    const MomentSequence src = matching_moments(nz, g, m_max);
    for (int m = 1; m <= m_max + 1; ++m)
      os << m << ',' << format_value(nz.at(m)) << ',' << format_value(src.at(m)) << '\n';
  }
  return {path};
}

std::vector<std::string> run_lp_check(const ExperimentConfig& cfg) {
  const Resolved r = resolve("lp-check", cfg, "gaussian(1)", "gaussian(1)", {0.5, 1.0, 2.0}, 0.01);
  const std::string path = r.cfg.out_prefix + "_lp.csv";
  std::ofstream os = open_out(path);
  os << config_line(r) << "\n";
  os << "gamma,p,k,residual\n";
  for (const double g : r.cfg.gammas) {
    const Problem p{r.source, noise_for_snr(r.noise, r.source, g)};
    const double vmin = std::min(variance(p.source), variance(p.noise));
    const double omega_max = 1.2 * 2.0 / std::sqrt(vmin);
    const CharFn fx = char_fn(p.source, omega_max, 4096);
    const CharFn fz = char_fn(p.noise, omega_max, 4096);
    for (const int pn : {2, 4}) {
      const double k = linear_coefficient_lp(p, pn);
      os << format_value(g) << ',' << pn << ',' << format_value(k) << ','
         << format_value(lp_linearity_residual(fx, fz, k, pn)) << '\n';
    }
  }
  return {path};
}

std::vector<std::string> run_two_snr(const ExperimentConfig& cfg) {
  const Resolved r = resolve("two-snr", cfg, "triangular(1)", "uniform(1)", {2.0, 8.0}, 0.01);
  if (r.cfg.gammas.size() != 2)
    throw ConfigError("two-snr requires exactly two gamma values");
  const auto [g1, g2] =
      two_snr_probe(r.source, r.noise, r.cfg.gammas[0], r.cfg.gammas[1]);
  const std::string path = r.cfg.out_prefix + "_twosnr.csv";
  std::ofstream os = open_out(path);
  os << config_line(r) << "\n";
  os << "gamma,gap\n";
  os << format_value(r.cfg.gammas[0]) << ',' << format_value(g1) << '\n';
  os << format_value(r.cfg.gammas[1]) << ',' << format_value(g2) << '\n';
  return {path};
}

}  // namespace linest
