#pragma once

#include <vector>

#include <Eigen/Core>

#include "hsfuse/cube.hpp"

namespace hsfuse {

/// 3x3 discrete Laplacian {0,-1,0; -1,4,-1; 0,-1,0}.
Eigen::Matrix3d laplacian_stencil();

/// Real tridiagonal matrix; lower(i) couples rows i+1 and i, upper(i) couples i and i+1.
struct TridiagMatrix {
  Eigen::VectorXd diag;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Index size() const { return diag.size(); }
  Eigen::MatrixXd to_dense() const;
};

/**
 * Spatial regularization operator D: one centred 3x3 stencil per band, applied as a
 * circular convolution and held through its DFT grid.
 *
 * A single shared stencil is the default; per-band stencils are accepted for generality.
 */
class SpatialGradOp {
 public:
  SpatialGradOp(Index height, Index width, const Eigen::Matrix3d& stencil = laplacian_stencil());
  SpatialGradOp(Index height, Index width, const std::vector<Eigen::Matrix3d>& per_band);

  Index height() const { return height_; }
  Index width() const { return width_; }
  bool shared() const { return responses_.size() == 1; }
  /// Number of distinct stencils (1 when shared).
  Index stencil_count() const { return static_cast<Index>(responses_.size()); }

  const Plane<Complex>& response(Index band) const { return responses_[shared() ? 0 : band]; }
  /// |response|^2, the weight of the spatial term in the V-step normal equations.
  const Plane<double>& power(Index band) const { return power_[shared() ? 0 : band]; }

 private:
  void add_stencil(const Eigen::Matrix3d& stencil);

  Index height_;
  Index width_;
  std::vector<Plane<Complex>> responses_;
  std::vector<Plane<double>> power_;
};

HsiCube laplacian_apply(const SpatialGradOp& op, const HsiCube& x);
HsiCube laplacian_adjoint(const SpatialGradOp& op, const HsiCube& x);

/// E0 x: band l of the result is x_{l+1} - x_l (B-1 output bands).
HsiCube spectral_diff_apply(const HsiCube& x);
/// E0^T y for a (B-1)-band cube y.
HsiCube spectral_diff_adjoint(const HsiCube& y);

/// E0^T E0 for B bands: diag (1, 2, ..., 2, 1), off-diagonals -1.
TridiagMatrix spectral_gram_tridiag(Index bands);

/// mu ||D(x - xt)||^2 + nu ||E(x - xt)||^2 with D the Laplacian on x's grid.
double regularizer_value(const HsiCube& x, const HsiCube& xt, double mu, double nu);
double regularizer_value(const SpatialGradOp& op, const HsiCube& x, const HsiCube& xt, double mu, double nu);

}  // namespace hsfuse
