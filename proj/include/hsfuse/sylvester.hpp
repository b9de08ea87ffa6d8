#pragma once

#include <Eigen/Core>

#include "hsfuse/cube.hpp"
#include "hsfuse/degradation.hpp"

namespace hsfuse {

/**
 * The X-step normal equations C1 X + X C2 = C3 with
 *
 *   C1 = R^T R + rho I_B            (dense, B x B, symmetric positive definite)
 *   C2 = (BS)(BS)^T                 (matrix-free through blur and decimation)
 *   C3 = R^T Z + Y (BS)^T + rho V
 */
struct SylvesterSystem {
  Eigen::MatrixXd c1;
  BlurOperator blur;
  Downsampler down;
  HsiCube c3;
  double rho = 1.0;
};

enum class SolveMethod { FastFrequency, ConjugateGradient };

const char* to_string(SolveMethod m);

struct SylvesterSolution {
  HsiCube x;
  double residual = 0.0;  ///< ||C1 X + X C2 - C3||_F / max(||C3||_F, eps)
  SolveMethod method = SolveMethod::FastFrequency;
  bool converged = true;
  int iterations = 0;  ///< CG iterations; 0 for the direct solver
};

SylvesterSystem build_system(const DegradationModel& model, const HsiCube& y, const HsiCube& z, const HsiCube& v,
                             double rho);

/// X C2 = blur^T(S^T(S(blur(X)))).
HsiCube apply_c2(const SylvesterSystem& sys, const HsiCube& x);
/// C1 X + X C2.
HsiCube sylvester_apply(const SylvesterSystem& sys, const HsiCube& x);
double sylvester_residual(const SylvesterSystem& sys, const HsiCube& x);

/// Conjugate gradient on the SPD operator X -> C1 X + X C2. Returns the best iterate with
/// converged = false if tol is not reached within max_iter.
SylvesterSolution solve_cg(const SylvesterSystem& sys, const HsiCube& x0, double tol, int max_iter);

/**
 * Direct frequency-domain solve.
 *
 * C1 = Q diag(lambda) Q^T decouples the bands. For eigen-channel l the remaining system
 * lambda_l x + x C2 = c is diagonal in the 2D DFT basis except for decimation aliasing:
 * C2 couples only the s^2 frequencies that fold onto the same low-resolution frequency,
 * and within such a group it is the rank-one matrix conj(d) d^T / s^2 (d the blur response
 * with the sampling phase folded in). Each group is solved by Sherman-Morrison:
 *
 *   x_g = (c_g - conj(d_g) * sum_t(d_t c_t) / (lambda s^2 + sum_t |d_t|^2)) / lambda
 *
 * Throws UnsupportedStructure when the grid is not divisible by s or the blur grid does
 * not match the image.
 */
SylvesterSolution solve_fast(const SylvesterSystem& sys);

/// solve_fast, falling back to solve_cg (tol 1e-9) when the fast path is unsupported.
SylvesterSolution solve(const SylvesterSystem& sys, const HsiCube* warm_start = nullptr);

}  // namespace hsfuse
