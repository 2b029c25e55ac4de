#pragma once

#include "linest/distribution.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace linest {

//! Invalid experiment parameters (reported with exit code 2 by the CLI, as
//! opposed to computation failures).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Flat parameter set shared by all experiments.  Empty/zero fields are
//! resolved to per-experiment defaults when the experiment runs.
struct ExperimentConfig {
  std::string experiment;
  std::vector<double> gammas;    //!< SNR values (repeatable)
  std::string source_spec;       //!< e.g. "gaussian(1)"
  std::string noise_spec;        //!< e.g. "uniform(1)"
  double step = 0.0;             //!< quadrature step; 0 picks the default
  int theta_count = 80;          //!< rotation samples over [0, 2 pi)
  std::string out_prefix = "out";
};

//! Parses "family(param)" with family in {gaussian, uniform, laplace,
//! triangular}; the parameter is the variance for gaussian/laplace and the
//! halfwidth for uniform/triangular.
Distribution parse_distribution(const std::string& spec);

//! Figure-2/3 style scalar experiment: estimator curves per SNR plus a sweep
//! table.  Returns the written file paths.
std::vector<std::string> run_example1(const ExperimentConfig& cfg);

//! Figure-4 style rotation experiment: normalized gap versus Givens angle.
std::vector<std::string> run_example2(const ExperimentConfig& cfg);

//! Source construction for the given noise and SNR: candidate density CSV
//! plus a one-line JSON verdict.
std::vector<std::string> run_match(const ExperimentConfig& cfg);

//! Source moments recursed from noise moments, next to the noise moments.
std::vector<std::string> run_moments(const ExperimentConfig& cfg);

//! Order-p linearity residuals at the bisection-optimal linear coefficient.
std::vector<std::string> run_lp_check(const ExperimentConfig& cfg);

//! Nonlinearity gaps at two SNR values for a matched pair.
std::vector<std::string> run_two_snr(const ExperimentConfig& cfg);

}  // namespace linest
