#pragma once

#include <Eigen/Core>

#include "hsfuse/cube.hpp"
#include "hsfuse/gradient.hpp"

namespace hsfuse {

/// Frequency-domain data of the V-step: min_v ||x - v||^2 + mu' ||D(v - xt)||^2 + nu' ||E(v - xt)||^2.
struct VStepSystem {
  FreqCube x_next;  ///< DFT of X_{k+1}
  FreqCube xt;      ///< DFT of the prior
  const SpatialGradOp* lap = nullptr;
  TridiagMatrix gram;  ///< E0^T E0 (all zeros for a single band)
  double mu_p = 0.0;
  double nu_p = 0.0;
};

/// T_f = I + mu' |Delta(f)|^2 + nu' E0^T E0, with |Delta(f)|^2 given per band.
TridiagMatrix assemble_tf(const Eigen::VectorXd& lap_power, const TridiagMatrix& gram, double mu_p, double nu_p);
/// Shared-stencil form: lap_value is the (non-negative) Laplacian response at f.
TridiagMatrix assemble_tf(double lap_value, const TridiagMatrix& gram, double mu_p, double nu_p);

/// Thomas algorithm for a real tridiagonal matrix and complex right-hand side.
Eigen::VectorXcd thomas_solve(const TridiagMatrix& t, const Eigen::VectorXcd& rhs);

VStepSystem make_vstep_system(const HsiCube& x_next, const HsiCube& xt, const SpatialGradOp& lap, double mu_p,
                              double nu_p);

/// v_f = T_f^{-1} (x_f + mu' |Delta(f)|^2 xt_f + nu' E0^T E0 xt_f) at frequency (row, col).
Eigen::VectorXcd solve_frequency(const VStepSystem& sys, Index row, Index col);

/// Closed-form V-step. mu_p = nu_p = 0 returns x_next unchanged.
HsiCube vstep(const HsiCube& x_next, const HsiCube& xt, const SpatialGradOp& lap, double mu_p, double nu_p);

/// ||x - v||^2 + mu' ||D(v - xt)||^2 + nu' ||E(v - xt)||^2.
double vstep_objective(const HsiCube& v, const HsiCube& x_next, const HsiCube& xt, const SpatialGradOp& lap,
                       double mu_p, double nu_p);

/// Half the gradient of vstep_objective: (v - x) + mu' D^T D (v - xt) + nu' E^T E (v - xt).
HsiCube vstep_gradient(const HsiCube& v, const HsiCube& x_next, const HsiCube& xt, const SpatialGradOp& lap,
                       double mu_p, double nu_p);

}  // namespace hsfuse
