#pragma once

#include <vector>

#include "hsfuse/cube.hpp"
#include "hsfuse/degradation.hpp"
#include "hsfuse/sylvester.hpp"

namespace hsfuse {

struct HqsConfig {
  double mu = 0.05;
  double nu = 0.001;
  double rho = 0.001;
  int max_iter = 20;
  double rel_tol = 1e-5;
  bool track_objective = true;
  /// rho is multiplied by this factor after every iteration. 1 keeps rho fixed.
  double rho_growth = 1.0;

  void validate() const;
};

struct FusionResult {
  HsiCube x_hat;
  int iterations = 0;
  /// L_rho(X_{k+1}, V_{k+1}) after each iteration.
  std::vector<double> objective_trace;
  /// L_rho(X_{k+1}, V_k), between the X-step and the V-step of each iteration.
  std::vector<double> x_step_trace;
  std::vector<double> sylvester_residuals;
  std::vector<SolveMethod> x_step_methods;
  bool converged = false;
};

/// Augmented Lagrangian
///   ||Y - XBS||^2 + ||Z - RX||^2 + rho ||X - V||^2 + mu ||D(v - xt)||^2 + nu ||E(v - xt)||^2.
double objective_value(const HsiCube& x, const HsiCube& v, const HsiCube& y, const HsiCube& z,
                       const DegradationModel& model, const HsiCube& xt, const HqsConfig& cfg);

/// Half quadratic splitting: V_0 = xt, then alternate the Sylvester X-step and the
/// closed-form V-step until the relative change of X drops to rel_tol or max_iter
/// iterations ran. Returns the last X.
FusionResult fuse(const HsiCube& y, const HsiCube& z, const DegradationModel& model, const HsiCube& xt,
                  const HqsConfig& cfg);

}  // namespace hsfuse
