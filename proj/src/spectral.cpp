#include "linest/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

namespace linest {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kZeroTol = 1e-12;  // |F| below this is treated as a zero

std::complex<double> int_pow(std::complex<double> z, int m) {
  std::complex<double> r{1.0, 0.0};
  while (m > 0) {
    if (m & 1) r *= z;
    z *= z;
    m >>= 1;
  }
  return r;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

//! Even-order touch positions and orders of a real CF magnitude profile on the
//! positive half-grid.  v[t] = |F(t * step)|; sign[t] tracks Re F.  Local
//! minima that extrapolate to ~zero without a sign change are classified by
//! the log-ratio slope around the fitted vertex.  Unclassifiable deep minima
//! are reported through `ambiguous` (branch continuation is undefined there).
struct TouchScan {
  std::map<std::size_t, int> touches;        // local-min index -> even order m
  std::map<std::size_t, int> windings;       // first index past the zero -> order m
  std::vector<std::size_t> ambiguous;        // deep minima with unusable order fits
};

TouchScan scan_touches(const std::vector<double>& v, const std::vector<double>& r) {
  TouchScan scan;
  const std::size_t n = v.size();
  for (std::size_t t = 3; t + 3 < n; ++t) {
    if (!(v[t] < v[t - 1] && v[t] <= v[t + 1])) continue;       // not a local min
    if (r[t - 1] * r[t + 1] < 0.0) continue;                    // sign change: odd crossing
    const double vm = v[t - 1], v0 = v[t], vp = v[t + 1];
    const double den = vm - 2.0 * v0 + vp;
    if (den <= 0.0) continue;
    const double vpar = v0 - 0.125 * (vm - vp) * (vm - vp) / den;
    const double mx = std::max(vm, vp);
    if (vpar >= 0.25 * mx) continue;   // does not extrapolate towards zero
    if (v0 >= 0.15 * mx) continue;     // true touches dip far below their neighbors
    const double vtx = 0.5 * (vm - vp) / den;  // vertex offset from t, in grid units
    std::vector<double> ests;
    const std::ptrdiff_t pairs[4][2] = {{1, 2}, {1, 3}, {-1, -2}, {-1, -3}};
    for (const auto& pr : pairs) {
      const std::size_t ja = t + pr[0], jb = t + pr[1];
      const double da = std::abs(static_cast<double>(pr[0]) - vtx);
      const double db = std::abs(static_cast<double>(pr[1]) - vtx);
      if (da > 0.4 && v[ja] > 0.0 && v[jb] > 0.0)
        ests.push_back(std::log(v[jb] / v[ja]) / std::log(db / da));
    }
    if (ests.empty()) {
      scan.ambiguous.push_back(t);
      continue;
    }
    const double m_raw = median_of(ests);
    const long m_int = 2 * std::lround(m_raw / 2.0);
    if (m_int >= 2 && std::abs(m_raw - static_cast<double>(m_int)) <= 0.5) {
      scan.touches.emplace(t, static_cast<int>(m_int));
      // the branch switches at the continuum zero, which the vertex locates
      // on either side of the discrete minimum
      scan.windings[vtx < 0.0 ? t : t + 1] += static_cast<int>(m_int);
    } else {
      scan.ambiguous.push_back(t);
    }
  }
  return scan;
}

}  // namespace

std::size_t CharFn::center() const {
  if (step <= 0.0 || values.empty()) throw std::invalid_argument("CharFn: empty grid");
  const long c = std::lround(-omega_min / step);
  if (c < 0 || static_cast<std::size_t>(c) >= values.size() ||
      std::abs(omega_min + static_cast<double>(c) * step) > 1e-6 * step)
    throw std::invalid_argument("CharFn: grid does not contain omega = 0");
  return static_cast<std::size_t>(c);
}

CharFn char_fn(const Distribution& d, double omega_max, std::size_t n) {
  if (n < 64 || n % 2 != 0)
    throw std::invalid_argument("char_fn: n must be even and >= 64");
  if (!(omega_max > 0.0)) throw std::invalid_argument("char_fn: omega_max must be > 0");
  CharFn F;
  F.step = 2.0 * omega_max / static_cast<double>(n);
  F.omega_min = -omega_max;
  F.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) F.values[j] = char_value(d, F.omega_at(j));
  F.provenance = std::holds_alternative<Tabulated>(d) ? Provenance::kTransformOfGrid
                                                      : Provenance::kClosedForm;
  return F;
}

CharFn paired_char_fn(const Distribution& d, double x_step, std::size_t count) {
  if (count < 64 || count % 2 != 0)
    throw std::invalid_argument("paired_char_fn: count must be even and >= 64");
  if (!(x_step > 0.0)) throw std::invalid_argument("paired_char_fn: x_step must be > 0");
  const double dw = 2.0 * kPi / (static_cast<double>(count) * x_step);
  if (!std::holds_alternative<Tabulated>(d)) {
    CharFn F;
    F.step = dw;
    F.omega_min = -static_cast<double>(count / 2) * dw;
    F.values.resize(count);
    for (std::size_t j = 0; j < count; ++j) F.values[j] = char_value(d, F.omega_at(j));
    F.provenance = Provenance::kClosedForm;
    return F;
  }
  // resample the tabulated density onto the paired x grid and transform
  const double x_min = -static_cast<double>(count / 2) * x_step;
  std::vector<double> f(count);
  double mass = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    f[k] = density(d, x_min + static_cast<double>(k) * x_step);
    mass += f[k];
  }
  mass *= x_step;
  if (!(mass > 0.5))
    throw std::runtime_error("paired_char_fn: resampled grid lost the mass");
  const double omega_min = -static_cast<double>(count / 2) * dw;
  std::vector<std::complex<double>> g(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double ph = omega_min * static_cast<double>(k) * x_step;
    g[k] = (f[k] / mass) * std::complex<double>(std::cos(ph), std::sin(ph));
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec(count);
  fft.inv(spec, g);  // (1/n) sum_k g_k exp(+2 pi i j k / n)
  CharFn F;
  F.step = dw;
  F.omega_min = omega_min;
  F.values.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double w = F.omega_at(j);
    const double ph = w * x_min;
    F.values[j] = x_step * static_cast<double>(count) * spec[j] *
                  std::complex<double>(std::cos(ph), std::sin(ph));
  }
  F.provenance = Provenance::kTransformOfGrid;
  return F;
}

RawGrid inverse_char_fn(const CharFn& F, double x_min, double x_step, std::size_t count) {
  const std::size_t n = F.values.size();
  if (n != count)
    throw std::invalid_argument("inverse_char_fn: frequency and x grids must have equal length");
  const double pairing = F.step * x_step * static_cast<double>(n);
  if (std::abs(pairing - 2.0 * kPi) > 1e-9 * 2.0 * kPi)
    throw std::invalid_argument("inverse_char_fn: grids are not Nyquist-paired "
                                "(need d_omega * x_step * n = 2 pi)");
  std::vector<std::complex<double>> g(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double ph = -static_cast<double>(j) * F.step * x_min;
    g[j] = F.values[j] * std::complex<double>(std::cos(ph), std::sin(ph));
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> h(n);
  fft.fwd(h, g);  // sum_j g_j exp(-2 pi i j k / n)
  RawGrid out;
  out.x_min = x_min;
  out.step = x_step;
  out.values.resize(n);
  const double scale = F.step / (2.0 * kPi);
  double max_im = 0.0, max_re = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = x_min + static_cast<double>(k) * x_step;
    const double ph = -F.omega_min * x;
    const std::complex<double> v = scale * h[k] * std::complex<double>(std::cos(ph), std::sin(ph));
    out.values[k] = v.real();
    max_re = std::max(max_re, std::abs(v.real()));
    max_im = std::max(max_im, std::abs(v.imag()));
  }
  out.imag_residue = max_re > 0.0 ? max_im / max_re : std::numeric_limits<double>::infinity();
  if (!(out.imag_residue < 1e-6))
    throw std::runtime_error("inverse_char_fn: imaginary residue " +
                             format_value(out.imag_residue) +
                             " (conjugate symmetry violated upstream)");
  return out;
}

LogCharFn log_unwrap(const CharFn& F) {
  const std::size_t n = F.values.size();
  if (n < 9) throw std::invalid_argument("log_unwrap: grid too small");
  const std::size_t c = F.center();
  if (std::abs(F.values[c] - std::complex<double>(1.0, 0.0)) > 1e-8)
    throw std::invalid_argument("log_unwrap: F(0) must equal 1");

  double max_im = 0.0, max_re = 0.0;
  for (const auto& z : F.values) {
    max_im = std::max(max_im, std::abs(z.imag()));
    max_re = std::max(max_re, std::abs(z.real()));
  }
  const bool real_path = max_im <= 1e-9 * max_re;

  const std::size_t hlen = n - c;  // omega >= 0 samples
  std::vector<std::complex<double>> out(n);

  if (real_path) {
    std::vector<double> v(hlen), r(hlen);
    for (std::size_t t = 0; t < hlen; ++t) {
      r[t] = F.values[c + t].real();
      v[t] = std::abs(r[t]);
    }
    const TouchScan scan = scan_touches(v, r);

    // collect continuation failures: ambiguous touches and bare near-zeros
    std::size_t first_bad = n;  // sentinel
    for (std::size_t t : scan.ambiguous) first_bad = std::min(first_bad, t);
    for (std::size_t t = 1; t < hlen; ++t) {
      if (v[t] >= kZeroTol) continue;
      bool exempt = false;
      for (const auto& [tt, m] : scan.touches) {
        (void)m;
        if (tt + 2 >= t && tt <= t + 2) exempt = true;
      }
      if (!exempt) {
        // interior point of an odd crossing: nearby alive samples change sign
        double left = 0.0, right = 0.0;
        for (std::size_t s = 1; s <= 2 && s <= t; ++s)
          if (v[t - s] >= kZeroTol) { left = r[t - s]; break; }
        for (std::size_t s = 1; s <= 2 && t + s < hlen; ++s)
          if (v[t + s] >= kZeroTol) { right = r[t + s]; break; }
        exempt = left * right < 0.0;
      }
      if (!exempt) first_bad = std::min(first_bad, t);
    }
    if (first_bad < n)
      throw ZeroCrossingError(static_cast<double>(first_bad) * F.step,
                              "log_unwrap: |F| reaches zero at omega = " +
                                  format_value(static_cast<double>(first_bad) * F.step) +
                                  " with no branch continuation; shrink omega_max or accept a "
                                  "restricted domain");

    long winding = 0;  // accumulated touch winding, in units of pi
    for (std::size_t t = 0; t < hlen; ++t) {
      const auto it = scan.windings.find(t);
      if (it != scan.windings.end()) winding -= it->second;
      const double mag = std::log(std::max(v[t], 1e-300));
      const double phase = (r[t] < 0.0 ? kPi : 0.0) + kPi * static_cast<double>(winding);
      out[c + t] = {mag, phase};
    }
  } else {
    // generic sequential unwrap for complex-valued F (asymmetric tabulated input)
    double theta = 0.0;
    for (std::size_t t = 0; t < hlen; ++t) {
      const std::complex<double> z = F.values[c + t];
      if (std::abs(z) < kZeroTol)
        throw ZeroCrossingError(static_cast<double>(t) * F.step,
                                "log_unwrap: |F| reaches zero at omega = " +
                                    format_value(static_cast<double>(t) * F.step));
      const double raw = std::arg(z);
      double delta = raw - theta;
      delta -= 2.0 * kPi * std::ceil(delta / (2.0 * kPi) - 0.5);  // into (-pi, pi]
      theta += delta;
      out[c + t] = {std::log(std::abs(z)), theta};
    }
  }

  // conjugate mirror onto the negative half
  for (std::size_t j = 0; j < c; ++j) {
    const std::size_t m = 2 * c - j;
    if (m < n) {
      out[j] = std::conj(out[m]);
    } else {
      // unpaired extreme sample of an even grid: continue one virtual step
      const std::complex<double> z = F.values[j];
      const double mag = std::log(std::max(std::abs(z), 1e-300));
      const double ref = out[j + 1].imag();  // already mirrored neighbor
      double ph = (real_path && z.real() < 0.0) ? -kPi : 0.0;
      if (!real_path) ph = std::arg(std::conj(z));
      ph += 2.0 * kPi * std::round((ref - ph) / (2.0 * kPi));
      out[j] = {mag, ph};
    }
  }

  LogCharFn L;
  L.omega_min = F.omega_min;
  L.step = F.step;
  L.values = std::move(out);
  return L;
}

CharFn fractional_power(const CharFn& F, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("fractional_power: gamma must be positive and finite");
  CharFn out;
  out.omega_min = F.omega_min;
  out.step = F.step;
  out.provenance = Provenance::kFractionalPower;
  const double g_round = std::round(gamma);
  if (g_round >= 1.0 && std::abs(gamma - g_round) < 1e-9) {
    const int m = static_cast<int>(g_round);
    out.values.resize(F.values.size());
    if (m == 1) {
      out.values = F.values;
    } else {
      for (std::size_t j = 0; j < F.values.size(); ++j)
        out.values[j] = int_pow(F.values[j], m);
    }
    return out;
  }
  const LogCharFn L = log_unwrap(F);
  out.values.resize(L.values.size());
  for (std::size_t j = 0; j < L.values.size(); ++j)
    out.values[j] = std::exp(gamma * L.values[j]);
  return out;
}

void write_csv(const CharFn& F, std::ostream& os) {
  os << "omega,re,im\n";
  for (std::size_t j = 0; j < F.values.size(); ++j)
    os << format_value(F.omega_at(j)) << ',' << format_value(F.values[j].real()) << ','
       << format_value(F.values[j].imag()) << '\n';
}

// Defined here so the distributions module can advertise convolution while the
// transforms live with the rest of the spectral machinery.
Distribution self_convolve(const Distribution& d, int n) {
  if (n < 1) throw std::invalid_argument("self_convolve: n must be >= 1");
  if (n == 1) return d;
  const double sh = support_halfwidth(d);
  const double base = std::isfinite(sh) ? sh : coverage_halfwidth(d, 1e-9);
  const double h_out = 1.1 * static_cast<double>(n) * base;
  const std::size_t nfft = std::size_t{1} << 18;
  const double dx = std::max(1.25e-4, 2.05 * h_out / static_cast<double>(nfft));

  CharFn F = paired_char_fn(d, dx, nfft);
  for (auto& z : F.values) z = int_pow(z, n);
  // mild mollifier against truncation ringing of slowly decaying spectra
  const double sig = 2.0 * dx;
  for (std::size_t j = 0; j < F.values.size(); ++j) {
    const double w = F.omega_at(j);
    F.values[j] *= std::exp(-sig * sig * w * w / 2.0);
  }
  const double x_min = -static_cast<double>(nfft / 2) * dx;
  const RawGrid raw = inverse_char_fn(F, x_min, dx, nfft);

  const long half_keep =
      std::min<long>(static_cast<long>(std::floor(h_out / dx)), static_cast<long>(nfft / 2) - 1);
  const std::size_t lo = nfft / 2 - static_cast<std::size_t>(half_keep);
  const std::size_t hi = nfft / 2 + static_cast<std::size_t>(half_keep);
  std::vector<double> vals(raw.values.begin() + static_cast<std::ptrdiff_t>(lo),
                           raw.values.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  return Tabulated{DensityGrid::from_raw(-static_cast<double>(half_keep) * dx, dx,
                                         std::move(vals))};
}

}  // namespace linest
