#pragma once

#include "linest/distribution.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace linest {

//! Additive-noise observation model Y = X + Z with independent X ~ source and
//! Z ~ noise.  The signal-to-noise ratio is the variance ratio.
struct Problem {
  Distribution source;
  Distribution noise;

  double gamma() const { return variance(source) / variance(noise); }
};

//! Uniform grid y_i = min + i * step, i = 0..count-1.
struct GridSpec {
  double min = 0.0;
  double step = 0.01;
  std::size_t count = 0;

  double at(std::size_t i) const { return min + static_cast<double>(i) * step; }
};

//! Symmetric y grid covering +-4 standard deviations of the observation.
GridSpec default_y_grid(const Problem& p, double step = 0.01);

//! An estimate h(y) sampled on a grid.  Points where the observation density
//! underflows carry the linear extrapolation h = fitted_slope * y and are
//! flagged.  fitted_slope is the mass-weighted least-squares line through the
//! origin.
struct Estimator {
  GridSpec grid;
  std::vector<double> h;
  std::vector<std::uint8_t> extrapolated;
  double fitted_slope = 0.0;
};

//! Conditional mean E[X | Y=y] by Riemann quadrature over the source support.
Estimator optimal_estimator(const Problem& p, const GridSpec& y_grid);

//! Straight line h(y) = k y on the given grid.
Estimator linear_estimator(const GridSpec& y_grid, double k);

//! Optimal slope of a linear estimate under squared loss: gamma/(gamma+1).
double linear_coefficient_mse(double gamma);

//! Optimal slope of a linear estimate under |.|^p loss, p in {2, 4}: the root
//! of E[(X - kY)^{p-1} Y] = 0, located by bisection over exact moments.
double linear_coefficient_lp(const Problem& p, int p_norm);

//! E |X - h(Y)|^p by a double Riemann sum.
double risk(const Problem& p, const Estimator& h, int p_norm);

//! (MSE of the exact-slope linear estimate - MSE of the conditional mean),
//! normalized by the latter.  Nonnegative by construction; zero iff the
//! optimal estimator is linear on the grid.
double nonlinearity_gap(const Problem& p);

struct SweepRow {
  double gamma = 0.0;
  double gap = 0.0;
  double fitted_slope = 0.0;
  double k_mse = 0.0;
  double risk_opt = 0.0;
  double risk_lin = 0.0;
};

//! Rescales `noise` so that variance(source)/variance(result) = gamma.
Distribution noise_for_snr(const Distribution& noise, const Distribution& source, double gamma);

//! Gap, fitted slope and risks across SNR values; the source is held fixed and
//! the noise is rescaled per row.
std::vector<SweepRow> snr_sweep(const Distribution& source, const Distribution& noise,
                                const std::vector<double>& gammas);

//! Gaps at two SNR values; both nearly zero only for the Gaussian pair.
std::pair<double, double> two_snr_probe(const Distribution& source, const Distribution& noise,
                                        double gamma1, double gamma2);

}  // namespace linest
