#include "linest/vector_case.hpp"

#include "linest/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace linest {

namespace {

void validate_cov(const CovPair& c) {
  for (const auto* m : {&c.rx, &c.rz}) {
    if (std::abs((*m)(0, 1) - (*m)(1, 0)) > 1e-12 * (1.0 + m->norm()))
      throw std::invalid_argument("CovPair: matrices must be symmetric");
    if (!((*m)(0, 0) > 0.0) || !(m->determinant() > 0.0))
      throw std::invalid_argument("CovPair: matrices must be positive definite");
  }
}

double finite_extent(const Distribution& d) {
  const double s = support_halfwidth(d);
  return std::isfinite(s) ? s : coverage_halfwidth(d, 1e-8);
}

//! Per-axis lattice kernel of an independent noise coordinate: density times
//! step, with exact cell averages for uniform coordinates (same convention as
//! the scalar quadrature).
std::vector<double> axis_kernel(const Distribution& d, long half, double step) {
  std::vector<double> w(static_cast<std::size_t>(2 * half + 1));
  if (const auto* u = std::get_if<Uniform>(&d)) {
    const double a = u->halfwidth;
    for (long k = -half; k <= half; ++k) {
      const double lo = std::max(-a, static_cast<double>(k) * step - step / 2.0);
      const double hi = std::min(a, static_cast<double>(k) * step + step / 2.0);
      w[static_cast<std::size_t>(k + half)] = std::max(0.0, hi - lo) / (2.0 * a);
    }
  } else {
    for (long k = -half; k <= half; ++k)
      w[static_cast<std::size_t>(k + half)] = density(d, static_cast<double>(k) * step) * step;
  }
  return w;
}

//! m_r(y) = integral x_pattern f_X(x) f_Z(y - x) dx for the four patterns
//! 1, x1, x2, |x|^2, by separable convolution with the axis kernels.
struct FieldSet2D {
  Grid2DSpec y;
  long ny = 0;
  std::vector<double> m0, m1a, m1b, m2;
};

FieldSet2D compute_fields_2d(const RotatedProduct2D& source, const RotatedProduct2D& noise,
                             const Grid2DSpec& grid) {
  if ((noise.rotation - Eigen::Matrix2d::Identity()).norm() > 1e-12)
    throw std::invalid_argument("optimal_estimator_2d: noise must be axis-aligned "
                                "(identity rotation)");
  const double step = grid.step;
  if (!(step > 0.0) || grid.count < 9 || grid.count % 2 == 0)
    throw std::invalid_argument("optimal_estimator_2d: grid must be symmetric with odd length");
  const long ny = static_cast<long>(grid.count / 2);
  if (std::abs(grid.min + static_cast<double>(ny) * step) > 1e-9 * step)
    throw std::invalid_argument("optimal_estimator_2d: grid must be centered at 0");

  const double e2 =
      1.025 * std::hypot(finite_extent(source.base1), finite_extent(source.base2));
  const long ne = static_cast<long>(std::ceil(e2 / step));
  const long kh1 = static_cast<long>(std::ceil(finite_extent(noise.base1) / step));
  const long kh2 = static_cast<long>(std::ceil(finite_extent(noise.base2) / step));
  const std::vector<double> ker1 = axis_kernel(noise.base1, kh1, step);
  const std::vector<double> ker2 = axis_kernel(noise.base2, kh2, step);

  const std::size_t nx = static_cast<std::size_t>(2 * ne + 1);
  const std::size_t nyy = grid.count;
  const Eigen::Matrix2d qt = source.rotation.transpose();

  // source-weighted moment patterns on the x lattice, row-major in (s1, s2)
  std::vector<double> a0(nx * nx), a1(nx * nx), a2(nx * nx), a3(nx * nx);
  for (long s1 = -ne; s1 <= ne; ++s1) {
    const double x1 = static_cast<double>(s1) * step;
    for (long s2 = -ne; s2 <= ne; ++s2) {
      const double x2 = static_cast<double>(s2) * step;
      const double c1 = qt(0, 0) * x1 + qt(0, 1) * x2;
      const double c2 = qt(1, 0) * x1 + qt(1, 1) * x2;
      const double f = density(source.base1, c1) * density(source.base2, c2);
      const std::size_t idx = static_cast<std::size_t>(s1 + ne) * nx +
                              static_cast<std::size_t>(s2 + ne);
      a0[idx] = f;
      a1[idx] = f * x1;
      a2[idx] = f * x2;
      a3[idx] = f * (x1 * x1 + x2 * x2);
    }
  }

  // separable convolution: columns (axis 2) first, then rows (axis 1)
  const auto convolve = [&](const std::vector<double>& a) {
    std::vector<double> tmp(nx * nyy, 0.0);
    for (long s1 = -ne; s1 <= ne; ++s1) {
      const double* row = &a[static_cast<std::size_t>(s1 + ne) * nx];
      double* trow = &tmp[static_cast<std::size_t>(s1 + ne) * nyy];
      for (long j2 = -ny; j2 <= ny; ++j2) {
        double acc = 0.0;
        for (long t = -kh2; t <= kh2; ++t) {
          const long s2 = j2 - t;
          if (s2 < -ne || s2 > ne) continue;
          acc += ker2[static_cast<std::size_t>(t + kh2)] *
                 row[static_cast<std::size_t>(s2 + ne)];
        }
        trow[static_cast<std::size_t>(j2 + ny)] = acc;
      }
    }
    std::vector<double> out(nyy * nyy, 0.0);
    for (long j1 = -ny; j1 <= ny; ++j1) {
      double* orow = &out[static_cast<std::size_t>(j1 + ny) * nyy];
      for (long j2 = -ny; j2 <= ny; ++j2) {
        double acc = 0.0;
        for (long t = -kh1; t <= kh1; ++t) {
          const long s1 = j1 - t;
          if (s1 < -ne || s1 > ne) continue;
          acc += ker1[static_cast<std::size_t>(t + kh1)] *
                 tmp[static_cast<std::size_t>(s1 + ne) * nyy +
                     static_cast<std::size_t>(j2 + ny)];
        }
        orow[static_cast<std::size_t>(j2 + ny)] = acc;
      }
    }
    return out;
  };

  // the axis kernels each carry one step factor, so the convolutions already
  // implement the step^2 Riemann weight of the x-lattice sum
  FieldSet2D f;
  f.y = grid;
  f.ny = ny;
  f.m0 = convolve(a0);
  f.m1a = convolve(a1);
  f.m1b = convolve(a2);
  f.m2 = convolve(a3);
  return f;
}

}  // namespace

Eigen::Matrix2d wiener_matrix(const CovPair& c) {
  validate_cov(c);
  return c.rx * (c.rx + c.rz).inverse();
}

LinearityTransform linearity_transform(const CovPair& c) {
  validate_cov(c);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> solver(c.rx, c.rz);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("linearity_transform: eigensolver failed");
  LinearityTransform t;
  t.lambda = solver.eigenvalues();
  if (!(t.lambda(0) > 0.0))
    throw std::runtime_error("linearity_transform: nonpositive eigenvalue");
  t.u = solver.eigenvectors().transpose();  // rows are left eigenvectors of R_X R_Z^-1
  for (int i = 0; i < 2; ++i) {
    t.u.row(i).normalize();
    const int lead = std::abs(t.u(i, 0)) >= std::abs(t.u(i, 1)) ? 0 : 1;
    if (t.u(i, lead) < 0.0) t.u.row(i) = -t.u.row(i);
  }
  t.degenerate = std::abs(t.lambda(0) - t.lambda(1)) < 1e-8 * (t.lambda(0) + t.lambda(1));
  return t;
}

DecorrelationReport check_decorrelation(const LinearityTransform& t, const CovPair& c) {
  validate_cov(c);
  const Eigen::Matrix2d dx = t.u * c.rx * t.u.transpose();
  const Eigen::Matrix2d dz = t.u * c.rz * t.u.transpose();
  DecorrelationReport r;
  r.max_offdiag_x = std::max(std::abs(dx(0, 1)), std::abs(dx(1, 0)));
  r.max_offdiag_z = std::max(std::abs(dz(0, 1)), std::abs(dz(1, 0)));
  const double scale = 1e-8 * (c.rx.trace() + c.rz.trace());
  r.pass = r.max_offdiag_x < scale && r.max_offdiag_z < scale;
  return r;
}

Eigen::Matrix2d covariance(const RotatedProduct2D& v) {
  Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
  d(0, 0) = variance(v.base1);
  d(1, 1) = variance(v.base2);
  return v.rotation * d * v.rotation.transpose();
}

double joint_density(const RotatedProduct2D& v, const Eigen::Vector2d& x) {
  const Eigen::Vector2d c = v.rotation.transpose() * x;
  return density(v.base1, c(0)) * density(v.base2, c(1));
}

Distribution marginal_density(const RotatedProduct2D& v, const Eigen::Vector2d& direction,
                              double step) {
  if (std::abs(direction.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("marginal_density: direction must be a unit vector");
  if (!(step > 0.0)) throw std::invalid_argument("marginal_density: step must be > 0");
  const Eigen::Vector2d ortho(-direction(1), direction(0));
  const Eigen::Vector2d a = v.rotation.transpose() * direction;
  const Eigen::Vector2d b = v.rotation.transpose() * ortho;
  const double radius = 1.02 * std::hypot(finite_extent(v.base1), finite_extent(v.base2));
  const long half = static_cast<long>(std::ceil(radius / step));
  std::vector<double> vals(static_cast<std::size_t>(2 * half + 1));
  for (long m = -half; m <= half; ++m) {
    const double s = static_cast<double>(m) * step;
    double acc = 0.0;
    for (long t = -half; t <= half; ++t) {
      const double u = static_cast<double>(t) * step;
      acc += density(v.base1, s * a(0) + u * b(0)) * density(v.base2, s * a(1) + u * b(1));
    }
    vals[static_cast<std::size_t>(m + half)] = acc * step;
  }
  return Tabulated{DensityGrid::from_raw(-static_cast<double>(half) * step, step,
                                         std::move(vals))};
}

MarginalMatchReport marginal_matching_check(const RotatedProduct2D& source,
                                            const RotatedProduct2D& noise) {
  const CovPair c{covariance(source), covariance(noise)};
  const LinearityTransform t = linearity_transform(c);
  MarginalMatchReport rep;
  rep.degenerate = t.degenerate;
  const double vmin = std::min(t.u.row(0) * c.rx * t.u.row(0).transpose(),
                               t.u.row(1) * c.rx * t.u.row(1).transpose());
  if (!(vmin > 0.0)) throw std::runtime_error("marginal_matching_check: degenerate covariance");
  const double omega_max = 2.0 / std::sqrt(vmin);
  const std::size_t n = 2048;
  for (int i = 0; i < 2; ++i) {
    rep.lambda[static_cast<std::size_t>(i)] = t.lambda(i);
    const Eigen::Vector2d dir = t.u.row(i).transpose();
    const Distribution mx = marginal_density(source, dir);
    const Distribution mz = marginal_density(noise, dir);
    const CharFn fx = char_fn(mx, omega_max, n);
    const CharFn fz = char_fn(mz, omega_max, n);
    const CharFn fz_pow = fractional_power(fz, t.lambda(i));
    double sup = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      sup = std::max(sup, std::abs(fx.values[j] - fz_pow.values[j]));
    rep.sup_dev[static_cast<std::size_t>(i)] = sup;
    rep.pass[static_cast<std::size_t>(i)] = sup < 1e-3;
  }
  return rep;
}

bool independence_check(const RotatedProduct2D& source, const Eigen::Matrix2d& u) {
  if (std::holds_alternative<Gaussian>(source.base1) &&
      std::holds_alternative<Gaussian>(source.base2))
    return true;
  const Eigen::Matrix2d m = u * source.rotation;
  // signed permutation: each row and column has exactly one entry of modulus 1
  const double tol = 1e-10;
  const bool diag = std::abs(std::abs(m(0, 0)) - 1.0) < tol && std::abs(m(0, 1)) < tol &&
                    std::abs(m(1, 0)) < tol && std::abs(std::abs(m(1, 1)) - 1.0) < tol;
  const bool anti = std::abs(m(0, 0)) < tol && std::abs(std::abs(m(0, 1)) - 1.0) < tol &&
                    std::abs(std::abs(m(1, 0)) - 1.0) < tol && std::abs(m(1, 1)) < tol;
  return diag || anti;
}

Eigen::Matrix2d givens(double theta) {
  Eigen::Matrix2d g;
  g << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return g;
}

Grid2DSpec default_grid_2d(const RotatedProduct2D& source, const RotatedProduct2D& noise,
                           double step) {
  if (!(step > 0.0)) throw std::invalid_argument("default_grid_2d: step must be > 0");
  const double sy =
      std::sqrt((covariance(source).trace() + covariance(noise).trace()) / 2.0);
  const long ny = std::lround(4.0 * sy / step);
  Grid2DSpec g;
  g.step = step;
  g.min = -static_cast<double>(ny) * step;
  g.count = static_cast<std::size_t>(2 * ny + 1);
  return g;
}

Estimator2D optimal_estimator_2d(const RotatedProduct2D& source, const RotatedProduct2D& noise,
                                 const Grid2DSpec& grid) {
  const FieldSet2D f = compute_fields_2d(source, noise, grid);
  const Eigen::Matrix2d k = wiener_matrix({covariance(source), covariance(noise)});
  Estimator2D e;
  e.grid = grid;
  const std::size_t n = grid.count;
  e.h1.assign(n * n, 0.0);
  e.h2.assign(n * n, 0.0);
  e.extrapolated.assign(n * n, 0);
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    for (std::size_t i2 = 0; i2 < n; ++i2) {
      const std::size_t idx = i1 * n + i2;
      if (f.m0[idx] > 1e-300) {
        e.h1[idx] = f.m1a[idx] / f.m0[idx];
        e.h2[idx] = f.m1b[idx] / f.m0[idx];
      } else {
        const Eigen::Vector2d y(grid.at(i1), grid.at(i2));
        const Eigen::Vector2d lin = k * y;
        e.h1[idx] = lin(0);
        e.h2[idx] = lin(1);
        e.extrapolated[idx] = 1;
      }
    }
  }
  return e;
}

std::vector<GivensRow> givens_sweep(const Distribution& source_base,
                                    const Distribution& noise_base,
                                    const std::vector<double>& thetas) {
  std::vector<GivensRow> rows;
  rows.reserve(thetas.size());
  for (const double theta : thetas) {
    RotatedProduct2D src{source_base, source_base, givens(theta)};
    RotatedProduct2D noi{noise_base, noise_base, Eigen::Matrix2d::Identity()};
    const Grid2DSpec grid = default_grid_2d(src, noi);
    const FieldSet2D f = compute_fields_2d(src, noi, grid);
    const Eigen::Matrix2d rx = covariance(src), rz = covariance(noi);
    const Eigen::Matrix2d k = wiener_matrix({rx, rz});

    double mse_opt = 0.0, mse_lin_disc = 0.0;
    const std::size_t n = grid.count;
    for (std::size_t i1 = 0; i1 < n; ++i1) {
      const double y1 = grid.at(i1);
      for (std::size_t i2 = 0; i2 < n; ++i2) {
        const double y2 = grid.at(i2);
        const std::size_t idx = i1 * n + i2;
        if (f.m0[idx] > 1e-300)
          mse_opt += f.m2[idx] -
                     (f.m1a[idx] * f.m1a[idx] + f.m1b[idx] * f.m1b[idx]) / f.m0[idx];
        const double l1 = k(0, 0) * y1 + k(0, 1) * y2;
        const double l2 = k(1, 0) * y1 + k(1, 1) * y2;
        mse_lin_disc += f.m2[idx] - 2.0 * (l1 * f.m1a[idx] + l2 * f.m1b[idx]) +
                        (l1 * l1 + l2 * l2) * f.m0[idx];
      }
    }
    mse_opt *= grid.step * grid.step;
    mse_lin_disc *= grid.step * grid.step;

    GivensRow row;
    row.theta = theta;
    row.mse_opt = mse_opt;
    row.gap = (mse_lin_disc - mse_opt) / mse_opt;
    row.mse_lin = (rx - 2.0 * k * rx + k * (rx + rz) * k.transpose()).trace();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace linest
