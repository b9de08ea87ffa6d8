#pragma once

#include <filesystem>
#include <variant>

#include "hsfuse/cube.hpp"
#include "hsfuse/degradation.hpp"

namespace hsfuse {

/// Prior produced by an external method (e.g. a network) and stored as a cube file.
struct ExternalFile {
  std::filesystem::path path;
};

/// Bilinear upsampling of Y followed by per-pixel spectral back-projection onto R x = z.
struct NaiveFusion {};

/// Test harness only: hands back a known cube.
struct GroundTruthOracle {
  HsiCube truth;
};

using PriorSource = std::variant<ExternalFile, NaiveFusion, GroundTruthOracle>;

/// Builds the high-resolution prior X~ (B x H x W) for the given observations.
HsiCube make_prior(const PriorSource& src, const HsiCube& y, const HsiCube& z, const DegradationModel& model);

/// Bilinear interpolation of a low-resolution cube onto the s-times finer grid; LR pixel i
/// covers HR rows [s*i, s*i + s). Borders replicate the edge samples.
HsiCube bilinear_upsample(const HsiCube& y, int s);

/// x_p + R^T (R R^T)^{-1} (z_p - R x_p) for every pixel p.
HsiCube spectral_backproject(const HsiCube& x, const HsiCube& z, const SpectralResponse& srf);

}  // namespace hsfuse
