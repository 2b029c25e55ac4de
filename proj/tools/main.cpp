#include "linest/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

int main(int argc, char** argv) {
  linest::ExperimentConfig cfg;
  std::vector<std::string> written;

  CLI::App app{"linest: when is the optimal estimator of a noisy observation linear?\n"
               "Builds matching source/noise pairs, measures optimal-vs-linear gaps,\n"
               "and writes experiment tables as CSV."};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI file");
  app.allow_config_extras(CLI::config_extras_mode::error);  // reject unknown keys
  app.add_option("--gamma", cfg.gammas,
                 "SNR value(s), comma separated or repeated")
      ->delimiter(',');
  app.add_option("--source", cfg.source_spec, "source law, e.g. gaussian(1)");
  app.add_option("--noise", cfg.noise_spec, "noise law, e.g. uniform(1)");
  app.add_option("--step", cfg.step, "quadrature step (0 = experiment default)");
  app.add_option("--theta-count", cfg.theta_count, "rotation samples over [0, 2 pi)");
  app.add_option("--out", cfg.out_prefix, "output file prefix");

  const auto wire = [&](const char* name, const char* desc, auto runner) {
    CLI::App* sub = app.add_subcommand(name, desc);
    // let the shared options above also be given after the subcommand name
    sub->fallthrough();
    sub->callback([&, runner]() { written = runner(cfg); });
  };
  wire("example1", "estimator curves and gap sweep across SNR (scalar case)",
       linest::run_example1);
  wire("example2", "normalized gap versus Givens rotation angle (2-D case)",
       linest::run_example2);
  wire("match", "construct the matching source for a noise law and SNR",
       linest::run_match);
  wire("moments", "source moments recursed from noise moments", linest::run_moments);
  wire("lp-check", "order-p linearity residuals at the optimal linear coefficient",
       linest::run_lp_check);
  wire("two-snr", "nonlinearity gaps at two SNR values", linest::run_two_snr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const linest::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  for (const std::string& path : written) std::printf("wrote %s\n", path.c_str());
  return 0;
}
