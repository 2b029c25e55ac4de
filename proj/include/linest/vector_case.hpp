#pragma once

#include "linest/distribution.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

namespace linest {

//! Source/noise covariance pair of the 2-D observation model Y = X + Z.
struct CovPair {
  Eigen::Matrix2d rx;
  Eigen::Matrix2d rz;
};

//! Linear-MMSE (Wiener) matrix K = R_X (R_X + R_Z)^{-1}.
Eigen::Matrix2d wiener_matrix(const CovPair& c);

//! Eigendecomposition R_X R_Z^{-1} = U^{-1} diag(lambda) U with real positive
//! eigenvalues; rows of U have unit norm and a positive leading entry.  When
//! the eigenvalues coincide the decomposition is not unique and `degenerate`
//! is set.
struct LinearityTransform {
  Eigen::Matrix2d u;
  Eigen::Vector2d lambda;
  bool degenerate = false;
};

LinearityTransform linearity_transform(const CovPair& c);

//! U must decorrelate both covariances: U R U^T diagonal for R_X and R_Z.
struct DecorrelationReport {
  double max_offdiag_x = 0.0;
  double max_offdiag_z = 0.0;
  bool pass = false;
};

DecorrelationReport check_decorrelation(const LinearityTransform& t, const CovPair& c);

//! A 2-D random vector Q * (V1, V2) with independent scalar coordinates V_i
//! and an orthogonal rotation Q.
struct RotatedProduct2D {
  Distribution base1;
  Distribution base2;
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
};

Eigen::Matrix2d covariance(const RotatedProduct2D& v);

double joint_density(const RotatedProduct2D& v, const Eigen::Vector2d& x);

//! Density of the projection direction . X, by quadrature along the
//! orthogonal direction.  `direction` must be a unit vector.
Distribution marginal_density(const RotatedProduct2D& v, const Eigen::Vector2d& direction,
                              double step = 0.01);

//! Per-coordinate check of the vector matching condition: the transform of
//! [U X]_i must equal that of [U Z]_i raised to lambda_i.  sup_dev is taken
//! over the central frequency window; a coordinate passes below 1e-3.
struct MarginalMatchReport {
  std::array<double, 2> sup_dev{};
  std::array<double, 2> lambda{};
  std::array<bool, 2> pass{};
  bool degenerate = false;
};

MarginalMatchReport marginal_matching_check(const RotatedProduct2D& source,
                                            const RotatedProduct2D& noise);

//! True iff the coordinates of U * source are independent: U undoes the
//! rotation up to a signed permutation, or the base laws are Gaussian.
bool independence_check(const RotatedProduct2D& source, const Eigen::Matrix2d& u);

//! Rotation by theta: [[cos, -sin], [sin, cos]].
Eigen::Matrix2d givens(double theta);

//! Square symmetric grid (same min/step/count on both axes).
struct Grid2DSpec {
  double min = 0.0;
  double step = 0.02;
  std::size_t count = 0;

  double at(std::size_t i) const { return min + static_cast<double>(i) * step; }
};

//! Grid covering +-4 mean-axis standard deviations of the observation.
Grid2DSpec default_grid_2d(const RotatedProduct2D& source, const RotatedProduct2D& noise,
                           double step = 0.02);

//! Componentwise conditional mean on the grid, row-major in (i1, i2).
//! Flagged points carry the Wiener-linear extension K*y.
struct Estimator2D {
  Grid2DSpec grid;
  std::vector<double> h1;
  std::vector<double> h2;
  std::vector<std::uint8_t> extrapolated;
};

//! Requires the noise rotation to be the identity (the convolution kernel is
//! separable only in that frame); rotate the coordinates first if needed.
Estimator2D optimal_estimator_2d(const RotatedProduct2D& source, const RotatedProduct2D& noise,
                                 const Grid2DSpec& grid);

struct GivensRow {
  double theta = 0.0;
  double gap = 0.0;      //!< (discrete linear MSE - optimal MSE) / optimal MSE
  double mse_opt = 0.0;  //!< quadrature MSE of the conditional mean
  double mse_lin = 0.0;  //!< closed-form Wiener MSE (constant across theta)
};

//! Example-2 experiment: source rotated by G(theta), noise axis-aligned, both
//! with the given per-coordinate base laws.
std::vector<GivensRow> givens_sweep(const Distribution& source_base,
                                    const Distribution& noise_base,
                                    const std::vector<double>& thetas);

}  // namespace linest
