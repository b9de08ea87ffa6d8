#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "hsfuse/cube.hpp"

namespace hsfuse {

/// Linear-mixing synthetic scene: X = M A with p smooth endmember spectra and smooth
/// abundance maps on the simplex, scaled so max(X) = 1.
struct SceneSpec {
  Index bands = 31;
  Index height = 64;
  Index width = 64;
  Index endmembers = 5;
  double smoothness = 4.0;  ///< std. deviation (pixels) of the abundance smoothing kernel
  std::uint64_t seed = 7;

  void validate() const;
};

/// B x p matrix of positive, unit-peak spectra.
Eigen::MatrixXd generate_endmembers(const SceneSpec& spec);
/// p x N abundances, non-negative with unit column sums.
Eigen::MatrixXd generate_abundances(const SceneSpec& spec);
HsiCube generate_scene(const SceneSpec& spec);

}  // namespace hsfuse
