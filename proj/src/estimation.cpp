#include "linest/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace linest {

namespace {

//! Lattice weights approximating a density on k * step, k = -half..half.
//! Uniform distributions get exact cell averages so that their jump
//! discontinuities do not alias; smooth families are sampled pointwise.
std::vector<double> lattice_weights(const Distribution& d, long half, double step) {
  std::vector<double> w(static_cast<std::size_t>(2 * half + 1));
  if (const auto* u = std::get_if<Uniform>(&d)) {
    const double a = u->halfwidth;
    for (long k = -half; k <= half; ++k) {
      const double lo = std::max(-a, static_cast<double>(k) * step - step / 2.0);
      const double hi = std::min(a, static_cast<double>(k) * step + step / 2.0);
      w[static_cast<std::size_t>(k + half)] = std::max(0.0, hi - lo) / (2.0 * a) / step;
    }
  } else {
    for (long k = -half; k <= half; ++k)
      w[static_cast<std::size_t>(k + half)] = density(d, static_cast<double>(k) * step);
  }
  return w;
}

//! Conditional-moment fields m_r(y) = integral x^r f_X(x) f_Z(y-x) dx for
//! r = 0..2, on a y grid that must be symmetric with the shared lattice step.
struct FieldSet {
  GridSpec y;
  long y_half = 0;
  long x_half = 0;
  std::vector<double> m0, m1, m2;
};

FieldSet compute_fields(const Problem& p, const GridSpec& y_grid) {
  const double step = y_grid.step;
  if (!(step > 0.0) || y_grid.count < 9 || y_grid.count % 2 == 0)
    throw std::invalid_argument("estimation: y grid must be symmetric with odd length");
  const long ny = static_cast<long>(y_grid.count / 2);
  if (std::abs(y_grid.min + static_cast<double>(ny) * step) > 1e-9 * step)
    throw std::invalid_argument("estimation: y grid must be centered at 0");

  const long nx = std::lround(default_extent(p.source) / step);
  const std::vector<double> wx = lattice_weights(p.source, nx, step);
  const std::vector<double> wz = lattice_weights(p.noise, nx + ny, step);

  FieldSet f;
  f.y = y_grid;
  f.y_half = ny;
  f.x_half = nx;
  const std::size_t n = y_grid.count;
  f.m0.assign(n, 0.0);
  f.m1.assign(n, 0.0);
  f.m2.assign(n, 0.0);
  for (long j = -ny; j <= ny; ++j) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (long k = -nx; k <= nx; ++k) {
      const double wxk = wx[static_cast<std::size_t>(k + nx)];
      if (wxk == 0.0) continue;
      const double wzv = wz[static_cast<std::size_t>(j - k + nx + ny)];
      if (wzv == 0.0) continue;
      const double x = static_cast<double>(k) * step;
      const double c = wxk * wzv;
      s0 += c;
      s1 += c * x;
      s2 += c * x * x;
    }
    const std::size_t jj = static_cast<std::size_t>(j + ny);
    f.m0[jj] = s0 * step;
    f.m1[jj] = s1 * step;
    f.m2[jj] = s2 * step;
  }
  return f;
}

Estimator estimator_from_fields(const FieldSet& f) {
  Estimator e;
  e.grid = f.y;
  const std::size_t n = f.y.count;
  e.h.assign(n, 0.0);
  e.extrapolated.assign(n, 0);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (f.m0[j] > 1e-300) {
      e.h[j] = f.m1[j] / f.m0[j];
      const double y = f.y.at(j);
      num += f.m0[j] * y * e.h[j];
      den += f.m0[j] * y * y;
    } else {
      e.extrapolated[j] = 1;
    }
  }
  e.fitted_slope = den > 0.0 ? num / den : 0.0;
  for (std::size_t j = 0; j < n; ++j)
    if (e.extrapolated[j]) e.h[j] = e.fitted_slope * f.y.at(j);
  return e;
}

//! Risks of the conditional mean and of the exact-k line, from one field pass.
struct GapParts {
  double risk_opt = 0.0;
  double risk_lin = 0.0;
};

GapParts gap_parts(const FieldSet& f, double k) {
  GapParts g;
  for (std::size_t j = 0; j < f.y.count; ++j) {
    const double y = f.y.at(j);
    if (f.m0[j] > 1e-300)
      g.risk_opt += f.m2[j] - f.m1[j] * f.m1[j] / f.m0[j];
    g.risk_lin += f.m2[j] - 2.0 * k * y * f.m1[j] + k * k * y * y * f.m0[j];
  }
  g.risk_opt *= f.y.step;
  g.risk_lin *= f.y.step;
  return g;
}

double pow_int(double v, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= v;
  return r;
}

}  // namespace

GridSpec default_y_grid(const Problem& p, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("default_y_grid: step must be > 0");
  const double sy = std::sqrt(variance(p.source) + variance(p.noise));
  const long ny = std::lround(4.0 * sy / step);
  GridSpec g;
  g.step = step;
  g.min = -static_cast<double>(ny) * step;
  g.count = static_cast<std::size_t>(2 * ny + 1);
  return g;
}

Estimator optimal_estimator(const Problem& p, const GridSpec& y_grid) {
  return estimator_from_fields(compute_fields(p, y_grid));
}

Estimator linear_estimator(const GridSpec& y_grid, double k) {
  Estimator e;
  e.grid = y_grid;
  e.h.resize(y_grid.count);
  e.extrapolated.assign(y_grid.count, 0);
  e.fitted_slope = k;
  for (std::size_t j = 0; j < y_grid.count; ++j) e.h[j] = k * y_grid.at(j);
  return e;
}

double linear_coefficient_mse(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("linear_coefficient_mse: gamma must be > 0");
  return gamma / (gamma + 1.0);
}

double linear_coefficient_lp(const Problem& p, int p_norm) {
  if (p_norm != 2 && p_norm != 4)
    throw std::invalid_argument("linear_coefficient_lp: p must be 2 or 4");
  // moments up to order p of both components; E[.^0] = 1
  std::vector<double> ex(static_cast<std::size_t>(p_norm) + 1),
      ez(static_cast<std::size_t>(p_norm) + 1);
  ex[0] = ez[0] = 1.0;
  for (int m = 1; m <= p_norm; ++m) {
    ex[static_cast<std::size_t>(m)] = moment(p.source, m);
    ez[static_cast<std::size_t>(m)] = moment(p.noise, m);
  }
  const auto comb = [](int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
  };
  // g(k) = E[(X-kY)^{p-1} Y] with X-kY = (1-k)X - kZ and Y = X + Z
  const auto g = [&](double k) {
    double acc = 0.0;
    for (int m = 0; m <= p_norm - 1; ++m) {
      const double c = comb(p_norm - 1, m) * std::pow(1.0 - k, m) *
                       std::pow(-k, p_norm - 1 - m);
      acc += c * (ex[static_cast<std::size_t>(m) + 1] * ez[static_cast<std::size_t>(p_norm - 1 - m)] +
                  ex[static_cast<std::size_t>(m)] * ez[static_cast<std::size_t>(p_norm - m)]);
    }
    return acc;
  };
  double lo = 1e-9, hi = 1.0 - 1e-9;
  if (!(g(lo) > 0.0 && g(hi) < 0.0))
    throw std::runtime_error("linear_coefficient_lp: stationarity condition has no sign change");
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double risk(const Problem& p, const Estimator& h, int p_norm) {
  if (p_norm != 2 && p_norm != 4)
    throw std::invalid_argument("risk: p must be 2 or 4");
  const double step = h.grid.step;
  const long ny = static_cast<long>(h.grid.count / 2);
  const long nx = std::lround(default_extent(p.source) / step);
  const std::vector<double> wx = lattice_weights(p.source, nx, step);
  const std::vector<double> wz = lattice_weights(p.noise, nx + ny, step);
  double acc = 0.0;
  for (long j = -ny; j <= ny; ++j) {
    const double hj = h.h[static_cast<std::size_t>(j + ny)];
    double row = 0.0;
    for (long k = -nx; k <= nx; ++k) {
      const double wxk = wx[static_cast<std::size_t>(k + nx)];
      if (wxk == 0.0) continue;
      const double wzv = wz[static_cast<std::size_t>(j - k + nx + ny)];
      if (wzv == 0.0) continue;
      row += wxk * wzv * pow_int(static_cast<double>(k) * step - hj, p_norm);
    }
    acc += row;
  }
  return acc * step * step;
}

double nonlinearity_gap(const Problem& p) {
  const FieldSet f = compute_fields(p, default_y_grid(p));
  const GapParts g = gap_parts(f, linear_coefficient_mse(p.gamma()));
  if (!(g.risk_opt > 0.0)) throw std::runtime_error("nonlinearity_gap: degenerate problem");
  return (g.risk_lin - g.risk_opt) / g.risk_opt;
}

Distribution noise_for_snr(const Distribution& noise, const Distribution& source, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("noise_for_snr: gamma must be positive and finite");
  const double target = variance(source) / gamma;
  return scaled(noise, std::sqrt(target / variance(noise)));
}

std::vector<SweepRow> snr_sweep(const Distribution& source, const Distribution& noise,
                                const std::vector<double>& gammas) {
  std::vector<SweepRow> rows;
  rows.reserve(gammas.size());
  for (const double g : gammas) {
    Problem p{source, noise_for_snr(noise, source, g)};
    const FieldSet f = compute_fields(p, default_y_grid(p));
    const Estimator e = estimator_from_fields(f);
    SweepRow row;
    row.gamma = g;
    row.k_mse = linear_coefficient_mse(p.gamma());
    const GapParts parts = gap_parts(f, row.k_mse);
    row.risk_opt = parts.risk_opt;
    row.risk_lin = parts.risk_lin;
    row.gap = (parts.risk_lin - parts.risk_opt) / parts.risk_opt;
    row.fitted_slope = e.fitted_slope;
    rows.push_back(row);
  }
  return rows;
}

std::pair<double, double> two_snr_probe(const Distribution& source, const Distribution& noise,
                                        double gamma1, double gamma2) {
  if (gamma1 == gamma2)
    throw std::invalid_argument("two_snr_probe: the two ratios must differ");
  const std::vector<SweepRow> rows = snr_sweep(source, noise, {gamma1, gamma2});
  return {rows[0].gap, rows[1].gap};
}

}  // namespace linest
