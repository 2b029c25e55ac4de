#pragma once

#include "linest/distribution.hpp"
#include "linest/spectral.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace linest {

//! Outcome of a source/noise construction attempt.
//!
//! kValid: the inverse transform is a nonnegative unit-mass density.
//! kInvalid: the candidate dips genuinely negative — no matching distribution
//!          exists for this family/exponent pair.
//! kDomainRestricted: the characteristic function reaches zero before the grid
//!          edge and the fractional power only continues on |omega| < omega_cut;
//!          the candidate is reported for inspection but never certified.
enum class Verdict { kValid, kInvalid, kDomainRestricted };

const char* verdict_name(Verdict v);

struct MatchOptions {
  double x_step = 1.25e-4;          //!< candidate grid spacing
  std::size_t count = std::size_t{1} << 18;  //!< grid length (power of two)
  double mollifier_sigma = 5e-4;    //!< Gaussian taper damping truncation ringing
  double validity_rel = 1e-4;       //!< negativity threshold relative to the peak
};

//! Raw result of matching: the candidate density before any clipping, with the
//! evidence used for the verdict.
struct MatchResult {
  Verdict verdict = Verdict::kInvalid;
  DensityGrid candidate;      //!< inverse transform as computed (may be negative)
  double min_density = 0.0;   //!< most negative candidate value
  double min_location = 0.0;  //!< x where the minimum is attained
  double mass = 0.0;          //!< integral of the candidate over the grid
  double omega_cut = 0.0;     //!< restriction radius (kDomainRestricted only)
  double exponent = 1.0;      //!< exponent applied to the characteristic function

  //! Converts a kValid candidate into a usable distribution (clips residual
  //! ringing, trims the tails, renormalizes).  Throws otherwise.
  Distribution to_distribution() const;
};

//! Constructs the source whose optimal estimator under `noise` is linear at
//! signal-to-noise ratio gamma, by inverting char_fn(noise)^gamma.
MatchResult match_source(const Distribution& noise, double gamma,
                         const MatchOptions& options = {});

//! Dual construction: the noise making `source` linearly estimable at ratio
//! gamma, via the 1/gamma power.
MatchResult match_noise(const Distribution& source, double gamma,
                        const MatchOptions& options = {});

//! Moments indexed by order (values[i] is the moment of order i+1).
struct MomentSequence {
  enum class Tag { kGiven, kRecursed };
  std::vector<double> values;
  Tag source_tag = Tag::kGiven;

  double at(int order) const;  //!< moment of the given order (1-based)
};

//! Moments of a distribution up to max_order, by closed form or quadrature.
MomentSequence moment_sequence(const Distribution& d, int max_order);

//! Moments of the matching source given noise moments up to order M+1, by the
//! triangular recursion
//!   E X^{m+1} = g E Z^{m+1} + sum_{i<m} [g C(m,i) - C(m,i+1)] E Z^{i+1} E X^{m-i}.
//! Requires a zero-mean noise sequence; M is capped at 10.
MomentSequence matching_moments(const MomentSequence& noise_moments, double gamma, int m_max);

//! Sup-norm residual of the order-p linearity condition
//!   sum_m C(p-1,m) F_X^(m)(w) F_Z^(p-1-m)(w) ((k-1)/k)^m = 0
//! over the central window |omega| <= 2/sqrt(min variance), normalized by the
//! largest single term.  Near zero certifies h(y)=k y as the L_p-optimal
//! estimator.  p must be 2 or 4; the grids of F_X and F_Z must coincide.
double lp_linearity_residual(const CharFn& f_x, const CharFn& f_z, double k, int p);

//! Candidate density as `x,f_candidate` rows.
void write_csv(const MatchResult& r, std::ostream& os);

//! One-line JSON verdict record.
std::string verdict_json(const MatchResult& r);

}  // namespace linest
