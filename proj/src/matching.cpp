#include "linest/matching.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>

namespace linest {

namespace {

std::complex<double> int_pow(std::complex<double> z, int m) {
  std::complex<double> r{1.0, 0.0};
  while (m > 0) {
    if (m & 1) r *= z;
    z *= z;
    m >>= 1;
  }
  return r;
}

double comb(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

MatchResult match_core(const Distribution& d, double expo, const MatchOptions& opt) {
  if (!(expo > 0.0) || !std::isfinite(expo))
    throw std::invalid_argument("match: exponent must be positive and finite");
  if (!(opt.x_step > 0.0) || opt.count < 1024 || opt.count % 2 != 0)
    throw std::invalid_argument("match: bad grid options");

  const CharFn base = paired_char_fn(d, opt.x_step, opt.count);
  const std::size_t n = opt.count;
  const std::size_t c = base.center();
  const double dw = base.step;
  const std::size_t hlen = n - c;

  // last index on the positive half where the spectrum is still alive; the
  // trailing dead run (underflowed tails) carries no usable information
  std::size_t o = hlen - 1;
  while (o > 0 && std::abs(base.values[c + o]) < 1e-12) --o;

  std::vector<std::complex<double>> powered(n, {0.0, 0.0});
  bool restricted = false;
  double omega_cut = 0.0;

  const double expo_round = std::round(expo);
  if (expo_round >= 1.0 && std::abs(expo - expo_round) < 1e-9) {
    const int m = static_cast<int>(expo_round);
    for (std::size_t j = 0; j < n; ++j) powered[j] = int_pow(base.values[j], m);
  } else {
    std::size_t ocur = o;
    for (int attempt = 0;; ++attempt) {
      CharFn sub;
      sub.omega_min = -static_cast<double>(ocur) * dw;
      sub.step = dw;
      sub.provenance = base.provenance;
      sub.values.assign(base.values.begin() + static_cast<std::ptrdiff_t>(c - ocur),
                        base.values.begin() + static_cast<std::ptrdiff_t>(c + ocur) + 1);
      try {
        const LogCharFn lc = log_unwrap(sub);
        for (std::size_t j = 0; j < lc.values.size(); ++j)
          powered[c - ocur + j] = std::exp(expo * lc.values[j]);
        break;
      } catch (const ZeroCrossingError& e) {
        // continuation broke down at e.omega: retry strictly inside that radius
        restricted = true;
        std::size_t keep = static_cast<std::size_t>(
            std::max<long>(0, std::lround(e.omega / dw) - 1));
        if (keep >= ocur) keep = ocur - 1;
        if (keep < 8 || attempt >= 8) throw;
        ocur = keep;
      }
    }
    if (restricted) omega_cut = static_cast<double>(ocur + 1) * dw;
  }

  const double sig = opt.mollifier_sigma;
  CharFn pw;
  pw.omega_min = base.omega_min;
  pw.step = dw;
  pw.provenance = Provenance::kFractionalPower;
  pw.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double w = pw.omega_min + static_cast<double>(j) * dw;
    pw.values[j] = powered[j] * std::exp(-sig * sig * w * w / 2.0);
  }

  const double x_min = -static_cast<double>(n / 2) * opt.x_step;
  const RawGrid raw = inverse_char_fn(pw, x_min, opt.x_step, n);

  MatchResult res;
  res.exponent = expo;
  res.candidate.x_min = x_min;
  res.candidate.step = opt.x_step;
  res.candidate.values = raw.values;
  res.omega_cut = omega_cut;

  double mn = raw.values[0], mx = raw.values[0], mass = 0.0;
  std::size_t argmin = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = raw.values[k];
    mass += v;
    if (v < mn) { mn = v; argmin = k; }
    if (v > mx) mx = v;
  }
  mass *= opt.x_step;
  res.min_density = mn;
  res.min_location = raw.x_at(argmin);
  res.mass = mass;

  if (restricted)
    res.verdict = Verdict::kDomainRestricted;
  else if (mn < -opt.validity_rel * mx)
    res.verdict = Verdict::kInvalid;
  else if (std::abs(mass - 1.0) < 1e-3)
    res.verdict = Verdict::kValid;
  else
    res.verdict = Verdict::kInvalid;
  return res;
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kValid: return "Valid";
    case Verdict::kInvalid: return "Invalid";
    case Verdict::kDomainRestricted: return "DomainRestricted";
  }
  return "?";
}

Distribution MatchResult::to_distribution() const {
  if (verdict != Verdict::kValid)
    throw std::runtime_error(std::string("MatchResult: cannot convert a ") +
                             verdict_name(verdict) + " candidate to a distribution");
  std::vector<double> clipped(candidate.values.size());
  for (std::size_t k = 0; k < clipped.size(); ++k)
    clipped[k] = std::max(0.0, candidate.values[k]);
  DensityGrid full = DensityGrid::from_raw(candidate.x_min, candidate.step, std::move(clipped));
  const double half = 1.05 * coverage_halfwidth(Tabulated{full}, 1e-9);
  const long hk = std::min<long>(std::lround(std::ceil(half / full.step)),
                                 static_cast<long>(full.values.size() / 2) - 1);
  const std::size_t ctr = full.values.size() / 2;
  std::vector<double> vals(full.values.begin() + static_cast<std::ptrdiff_t>(ctr - hk),
                           full.values.begin() + static_cast<std::ptrdiff_t>(ctr + hk) + 1);
  return Tabulated{DensityGrid::from_raw(-static_cast<double>(hk) * full.step, full.step,
                                         std::move(vals))};
}

MatchResult match_source(const Distribution& noise, double gamma, const MatchOptions& options) {
  return match_core(noise, gamma, options);
}

MatchResult match_noise(const Distribution& source, double gamma, const MatchOptions& options) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("match_noise: gamma must be positive and finite");
  return match_core(source, 1.0 / gamma, options);
}

double MomentSequence::at(int order) const {
  if (order < 1 || static_cast<std::size_t>(order) > values.size())
    throw std::invalid_argument("MomentSequence: order out of range");
  return values[static_cast<std::size_t>(order) - 1];
}

MomentSequence moment_sequence(const Distribution& d, int max_order) {
  if (max_order < 1) throw std::invalid_argument("moment_sequence: max_order must be >= 1");
  MomentSequence s;
  s.source_tag = MomentSequence::Tag::kGiven;
  s.values.resize(static_cast<std::size_t>(max_order));
  for (int m = 1; m <= max_order; ++m)
    s.values[static_cast<std::size_t>(m) - 1] = moment(d, m);
  return s;
}

MomentSequence matching_moments(const MomentSequence& noise_moments, double gamma, int m_max) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("matching_moments: gamma must be positive and finite");
  if (m_max < 1 || m_max > 10)
    throw std::invalid_argument("matching_moments: m_max must lie in [1, 10]");
  if (noise_moments.values.size() < static_cast<std::size_t>(m_max) + 1)
    throw std::invalid_argument("matching_moments: noise moments up to order m_max + 1 required");
  const auto ez = [&](int order) { return noise_moments.at(order); };
  if (std::abs(ez(1)) > 1e-9 * (1.0 + std::abs(ez(2))))
    throw std::invalid_argument("matching_moments: zero-mean noise required");

  std::vector<double> ex(static_cast<std::size_t>(m_max) + 2, 0.0);  // ex[r] = E X^r
  ex[0] = 1.0;
  ex[1] = gamma * ez(1);
  for (int m = 1; m <= m_max; ++m) {
    double acc = gamma * ez(m + 1);
    for (int i = 0; i <= m - 1; ++i) {
      const double a = gamma * comb(m, i) - comb(m, i + 1);
      acc += a * ez(i + 1) * ex[static_cast<std::size_t>(m - i)];
    }
    ex[static_cast<std::size_t>(m) + 1] = acc;
  }
  MomentSequence out;
  out.source_tag = MomentSequence::Tag::kRecursed;
  out.values.assign(ex.begin() + 1, ex.end());
  return out;
}

double lp_linearity_residual(const CharFn& f_x, const CharFn& f_z, double k, int p) {
  if (p != 2 && p != 4)
    throw std::invalid_argument("lp_linearity_residual: p must be 2 or 4");
  if (!(k > 0.0 && k < 1.0))
    throw std::invalid_argument("lp_linearity_residual: k must lie in (0, 1)");
  const std::size_t n = f_x.values.size();
  if (n != f_z.values.size() || std::abs(f_x.step - f_z.step) > 1e-12 * f_x.step ||
      std::abs(f_x.omega_min - f_z.omega_min) > 1e-9 * f_x.step)
    throw std::invalid_argument("lp_linearity_residual: grids must coincide");
  const std::size_t c = f_x.center();
  const double dw = f_x.step;

  // curvature at the origin estimates the variances; the residual window stays
  // where the flatter (smaller-variance) transform is still well-conditioned
  const double vx = 2.0 * (1.0 - f_x.values[c + 1].real()) / (dw * dw);
  const double vz = 2.0 * (1.0 - f_z.values[c + 1].real()) / (dw * dw);
  if (!(vx > 0.0) || !(vz > 0.0))
    throw std::runtime_error("lp_linearity_residual: could not estimate curvature at omega = 0");
  const double window = 2.0 / std::sqrt(std::min(vx, vz));

  const auto d1 = [&](const CharFn& f, std::size_t j) {
    return (f.values[j + 1] - f.values[j - 1]) / (2.0 * dw);
  };
  const auto d2 = [&](const CharFn& f, std::size_t j) {
    return (f.values[j + 1] - 2.0 * f.values[j] + f.values[j - 1]) / (dw * dw);
  };
  const auto d3 = [&](const CharFn& f, std::size_t j) {
    return (f.values[j + 2] - 2.0 * f.values[j + 1] + 2.0 * f.values[j - 1] - f.values[j - 2]) /
           (2.0 * dw * dw * dw);
  };

  const double coef = (k - 1.0) / k;
  const int nterms = p;  // p-1 derivative orders, p terms: m = 0..p-1
  double sup_sum = 0.0;
  std::vector<double> sup_term(static_cast<std::size_t>(nterms), 0.0);
  std::size_t used = 0;
  for (std::size_t j = 2; j + 2 < n; ++j) {
    if (std::abs(f_x.omega_at(j)) > window) continue;
    ++used;
    std::complex<double> sum{0.0, 0.0};
    for (int m = 0; m < nterms; ++m) {
      std::complex<double> tx, tz;
      const int mz = p - 1 - m;
      switch (m) {
        case 0: tx = f_x.values[j]; break;
        case 1: tx = d1(f_x, j); break;
        case 2: tx = d2(f_x, j); break;
        default: tx = d3(f_x, j); break;
      }
      switch (mz) {
        case 0: tz = f_z.values[j]; break;
        case 1: tz = d1(f_z, j); break;
        case 2: tz = d2(f_z, j); break;
        default: tz = d3(f_z, j); break;
      }
      const std::complex<double> term = comb(p - 1, m) * std::pow(coef, m) * tx * tz;
      sum += term;
      sup_term[static_cast<std::size_t>(m)] =
          std::max(sup_term[static_cast<std::size_t>(m)], std::abs(term));
    }
    sup_sum = std::max(sup_sum, std::abs(sum));
  }
  if (used < 257)
    throw std::runtime_error("lp_linearity_residual: grid too coarse for stable derivatives "
                             "inside the central window");
  const double den = *std::max_element(sup_term.begin(), sup_term.end());
  if (!(den > 0.0))
    throw std::runtime_error("lp_linearity_residual: degenerate transforms");
  return sup_sum / den;
}

void write_csv(const MatchResult& r, std::ostream& os) {
  os << "x,f_candidate\n";
  for (std::size_t k = 0; k < r.candidate.values.size(); ++k)
    os << format_value(r.candidate.x_at(k)) << ',' << format_value(r.candidate.values[k]) << '\n';
}

std::string verdict_json(const MatchResult& r) {
  std::string s = "{\"verdict\":\"";
  s += verdict_name(r.verdict);
  s += "\",\"min_density\":" + format_value(r.min_density);
  s += ",\"mass\":" + format_value(r.mass);
  if (r.verdict == Verdict::kInvalid)
    s += ",\"min_location\":" + format_value(r.min_location);
  if (r.verdict == Verdict::kDomainRestricted)
    s += ",\"omega_cut\":" + format_value(r.omega_cut);
  s += "}";
  return s;
}

}  // namespace linest
