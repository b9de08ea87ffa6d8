#pragma once

#include <cstdint>
#include <variant>

#include <Eigen/Core>

#include "hsfuse/cube.hpp"

namespace hsfuse {

/// k x k box filter. The anchor sits at (k-1, k-1), so the blurred value at (r, c) is the
/// mean over rows [r, r+k) and columns [c, c+k); followed by phase-(0,0) decimation with
/// s = k this is exact averaging over non-overlapping blocks.
struct UniformBlock {
  int size = 1;
};

/// Sampled isotropic Gaussian on a support x support grid (support odd), centred.
struct GaussianKernel {
  double sigma = 1.0;
  int support = 5;
};

/// Arbitrary kernel grid. Negative anchors select the centre (rows/2, cols/2).
struct CustomKernel {
  Eigen::MatrixXd weights;
  int anchor_row = -1;
  int anchor_col = -1;
};

using KernelSpec = std::variant<UniformBlock, GaussianKernel, CustomKernel>;

/**
 * Spatial blur B with circular boundaries, stored through its 2D DFT (B = F diag(d) F^H).
 *
 * Kernel-built operators are normalized to unit sum (DC response 1).
 */
class BlurOperator {
 public:
  BlurOperator(Index height, Index width, const KernelSpec& spec);

  /// Wraps a frequency grid directly. Only conjugate symmetry (real kernel) is checked;
  /// the unit-DC invariant of kernel-built operators does not apply.
  static BlurOperator from_response(Plane<Complex> response);
  static BlurOperator identity(Index height, Index width);

  Index height() const { return response_.rows(); }
  Index width() const { return response_.cols(); }
  const Plane<Complex>& response() const { return response_; }
  /// The circularly embedded spatial kernel (height x width).
  const Plane<double>& kernel() const { return kernel_; }

 private:
  BlurOperator(Plane<double> kernel, Plane<Complex> response);

  Plane<double> kernel_;
  Plane<Complex> response_;
};

/// Decimation S keeping pixel (s*i + phase_row, s*j + phase_col).
struct Downsampler {
  int factor = 1;
  int phase_row = 0;
  int phase_col = 0;

  Downsampler() = default;
  explicit Downsampler(int s, int phase_r = 0, int phase_c = 0);
};

/// RGB camera response R (b x B), non-negative with unit row sums.
class SpectralResponse {
 public:
  /// Rows are normalized to sum 1; negative entries or an all-zero row are rejected.
  explicit SpectralResponse(Eigen::MatrixXd r);

  const Eigen::MatrixXd& matrix() const { return r_; }
  Index out_bands() const { return r_.rows(); }
  Index in_bands() const { return r_.cols(); }

 private:
  Eigen::MatrixXd r_;
};

/// Gaussian bands centred at 450/550/650 nm (sigma 40 nm) sampled on `bands` channels
/// spread uniformly over [wl_min, wl_max].
SpectralResponse default_srf(Index bands, double wl_min = 400.0, double wl_max = 700.0);

struct DegradationModel {
  BlurOperator blur;
  Downsampler down;
  SpectralResponse srf;

  Dims hr_dims() const { return {srf.in_bands(), blur.height(), blur.width()}; }
  Dims lr_dims() const;
  Dims rgb_dims() const { return {srf.out_bands(), blur.height(), blur.width()}; }
};

HsiCube blur_apply(const BlurOperator& op, const HsiCube& x);
HsiCube blur_adjoint(const BlurOperator& op, const HsiCube& x);

HsiCube downsample(const Downsampler& d, const HsiCube& x);
/// Zero-insertion S^T onto an hr_height x hr_width grid.
HsiCube upsample_adjoint(const Downsampler& d, const HsiCube& y, Index hr_height, Index hr_width);

HsiCube srf_apply(const SpectralResponse& r, const HsiCube& x);
HsiCube srf_adjoint(const SpectralResponse& r, const HsiCube& z);

struct Observation {
  HsiCube y;  ///< low-resolution HSI, X B S
  HsiCube z;  ///< high-resolution RGB, R X
};

Observation degrade(const DegradationModel& model, const HsiCube& x);

/// Adds i.i.d. N(0, sigma^2) noise; sigma == 0 returns the input unchanged.
HsiCube add_noise(const HsiCube& x, double sigma, std::uint64_t seed);

}  // namespace hsfuse
