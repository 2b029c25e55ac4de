#pragma once
//! Scalar zero-mean distributions: the four closed-form families plus
//! tabulated densities on uniform grids.  Every other module consumes these.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace linest {

//! Formats a value with 12 significant digits (the CSV convention used by
//! every serializer in the library).
std::string format_value(double v);

//! Density samples on a uniform grid, normalized so that sum(values)*step = 1.
struct DensityGrid {
  double x_min = 0.0;
  double step = 0.0;
  std::vector<double> values;

  double x_at(std::size_t i) const { return x_min + static_cast<double>(i) * step; }
  double mass() const;

  //! Builds a grid from raw transform output.  Ringing-level negatives
  //! (>= -1e-9 * max) are clipped to zero and the grid is renormalized;
  //! genuinely negative input throws std::invalid_argument.
  static DensityGrid from_raw(double x_min, double step, std::vector<double> values);
};

struct Gaussian { double variance = 1.0; };
struct Uniform { double halfwidth = 1.0; };
struct Laplace { double variance = 1.0; };
struct Triangular { double halfwidth = 1.0; };  // sum of two Uniform(halfwidth)
struct Tabulated { DensityGrid grid; };

using Distribution = std::variant<Gaussian, Uniform, Laplace, Triangular, Tabulated>;

//! Density f(x).  Closed forms for the four families (the uniform edge point
//! carries the midpoint value 1/(4a)); linear interpolation for tabulated
//! grids, zero outside.
double density(const Distribution& d, double x);

double variance(const Distribution& d);

//! Raw moment E[X^order], order >= 1.  Odd moments of the symmetric families
//! are exactly zero.  Tabulated grids are limited to order <= 12; beyond that
//! tail truncation dominates and the call throws.
double moment(const Distribution& d, int order);

//! Halfwidth of the support; +infinity for Gaussian and Laplace.
double support_halfwidth(const Distribution& d);

//! Smallest a such that P(|X| > a) <= tail.
double coverage_halfwidth(const Distribution& d, double tail);

//! Law of factor * X, factor > 0.
Distribution scaled(const Distribution& d, double factor);

//! Characteristic function value E[exp(i omega X)].
std::complex<double> char_value(const Distribution& d, double omega);

std::string family_name(const Distribution& d);

//! Samples the density on the given grid and normalizes.  Throws when the
//! grid covers less than 1 - 1e-6 of the mass.
DensityGrid tabulate(const Distribution& d, double x_min, double step, std::size_t count);

//! Grid extent used by default tabulations and quadratures: 10% padding over
//! max(6 sigma, support halfwidth, the 1e-8 tail quantile).  The quantile
//! term keeps heavy-ish tails (Laplace) inside the coverage requirement.
double default_extent(const Distribution& d);

//! Symmetric grid at the default extent with the toolkit-wide step 0.01.
DensityGrid default_tabulation(const Distribution& d, double step = 0.01);

//! Law of the sum of n independent copies, as a Tabulated distribution
//! (computed through the spectral transforms).  n = 1 returns d itself.
Distribution self_convolve(const Distribution& d, int n);

//! CSV serialization: header "x,f", one row per grid point.
void write_csv(const DensityGrid& g, std::ostream& os);

}  // namespace linest
