#pragma once
//! Characteristic-function machinery: sampled transforms, numerically paired
//! inversion, and branch-tracked fractional powers F^gamma.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "linest/distribution.hpp"

namespace linest {

enum class Provenance { kClosedForm, kTransformOfGrid, kFractionalPower };

//! F(omega) = E[exp(i omega X)] on a uniform frequency grid containing
//! omega = 0.  Conjugate-symmetric for the (real-density) laws in scope.
struct CharFn {
  double omega_min = 0.0;
  double step = 0.0;
  std::vector<std::complex<double>> values;
  Provenance provenance = Provenance::kClosedForm;

  double omega_at(std::size_t j) const { return omega_min + static_cast<double>(j) * step; }
  //! Index of the omega = 0 sample; throws if the grid does not contain it.
  std::size_t center() const;
};

//! Unwrapped log F on the same grid: log F(0) = 0, continued outward with the
//! branch rules described at log_unwrap.
struct LogCharFn {
  double omega_min = 0.0;
  double step = 0.0;
  std::vector<std::complex<double>> values;
};

//! Raw inverse-transform output; real values that may be negative (validity
//! classification happens in the matching module).
struct RawGrid {
  double x_min = 0.0;
  double step = 0.0;
  std::vector<double> values;
  double imag_residue = 0.0;  // max|Im| / max|Re| before the imaginary part is dropped

  double x_at(std::size_t k) const { return x_min + static_cast<double>(k) * step; }
};

//! |F| fell below the zero threshold (1e-12) at a grid point where no branch
//! continuation applies (not an odd crossing, not a classifiable even touch).
struct ZeroCrossingError : std::runtime_error {
  double omega;
  ZeroCrossingError(double omega_, const std::string& what_)
      : std::runtime_error(what_), omega(omega_) {}
};

//! Samples the characteristic function on the symmetric grid
//! omega_j = (j - n/2) * (2 omega_max / n); closed forms for the four
//! families, direct quadrature of the grid for tabulated laws.
CharFn char_fn(const Distribution& d, double omega_max, std::size_t n);

//! Characteristic function on the frequency grid Nyquist-paired with an
//! x grid of the given step and count: d_omega = 2 pi / (count * x_step).
CharFn paired_char_fn(const Distribution& d, double x_step, std::size_t count);

//! (1/2pi) integral of F(omega) exp(-i omega x); requires the paired-grid
//! relation d_omega * x_step * count = 2 pi.  Throws when the imaginary
//! residue exceeds 1e-6 (conjugate-symmetry violation upstream).
RawGrid inverse_char_fn(const CharFn& F, double x_min, double x_step, std::size_t count);

//! Branch-continued logarithm.  Marches outward from log F(0) = 0 on the
//! omega >= 0 half and mirrors conjugate-symmetrically.  Odd zero crossings
//! of a real F keep the principal phase (Im jumps by pi); even-order touches
//! (|F| dips to ~0 without a sign change) are detected by a local parabola
//! fit, their order m estimated from log-ratio slopes, and each touch winds
//! the phase by -m pi from there on.  Unclassifiable near-zeros throw
//! ZeroCrossingError with the first offending omega.
LogCharFn log_unwrap(const CharFn& F);

//! F^gamma via exp(gamma * log_unwrap(F)); integer gamma uses the exact
//! pointwise power (no branch machinery), gamma = 1 copies F.
CharFn fractional_power(const CharFn& F, double gamma);

//! CSV serialization: header "omega,re,im".
void write_csv(const CharFn& F, std::ostream& os);

}  // namespace linest
