#include <chrono>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace hsfuse;

namespace {

struct Problem {
  DegradationModel model;
  HsiCube y, z, v;
};

Problem make_problem(const Dims& d, int s, const KernelSpec& kernel, Index rgb, std::mt19937_64& rng,
                     const Downsampler& down) {
  DegradationModel m{BlurOperator(d.height, d.width, kernel), down, oracle::random_srf(rgb, d.bands, rng)};
  (void)s;
  const HsiCube x = oracle::random_cube(d, rng, 0.0, 1.0);
  const Observation o = degrade(m, x);
  return {m, o.y, o.z, oracle::random_cube(d, rng, 0.0, 1.0)};
}

Problem make_problem(const Dims& d, int s, const KernelSpec& kernel, Index rgb, std::mt19937_64& rng) {
  return make_problem(d, s, kernel, rgb, rng, Downsampler(s));
}

// Dense C1 X + X C2 = C3 on the B x N matricization.
Eigen::MatrixXd dense_solution(const SylvesterSystem& sys) {
  const Eigen::MatrixXd a = oracle::blur_decimate_matrix(sys.blur, sys.down);
  return oracle::dense_sylvester_solve(sys.c1, a.transpose() * a, sys.c3.matrix());
}

}  // namespace

TEST(SylvesterSystem, C3MatchesDenseAssembly) {
  std::mt19937_64 rng(50);
  const Problem p = make_problem({4, 8, 8}, 2, GaussianKernel{1.0, 3}, 2, rng);
  const SylvesterSystem sys = build_system(p.model, p.y, p.z, p.v, 0.3);
  const Eigen::MatrixXd a = oracle::blur_decimate_matrix(p.model.blur, p.model.down);
  const Eigen::MatrixXd r = p.model.srf.matrix();
  const Eigen::MatrixXd c3 = r.transpose() * oracle::mat(p.z) + oracle::mat(p.y) * a + 0.3 * oracle::mat(p.v);
  EXPECT_LT(oracle::rel_err(sys.c3.matrix(), c3), 1e-12);
  Eigen::MatrixXd c1 = r.transpose() * r;
  c1.diagonal().array() += 0.3;
  EXPECT_LT(oracle::rel_err(sys.c1, c1), 1e-14);
  // X C2 through the operators equals the dense product
  const HsiCube x = oracle::random_cube({4, 8, 8}, rng);
  EXPECT_LT(oracle::rel_err(apply_c2(sys, x).matrix(), oracle::mat(x) * a.transpose() * a), 1e-12);
}

TEST(SylvesterSystem, C1SpectrumBoundedBelowByRho) {
  const DegradationModel m{BlurOperator::identity(8, 8), Downsampler(2), default_srf(31)};
  const SylvesterSystem sys =
      build_system(m, cube_new(31, 4, 4, 0.0), cube_new(3, 8, 8, 0.0), cube_new(31, 8, 8, 0.0), 0.001);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sys.c1).eigenvalues();
  EXPECT_GE(ev.minCoeff(), 0.001 - 1e-12);
  EXPECT_EQ((ev.array() < 0.001 + 1e-9).count(), 28);
}

TEST(SylvesterSystem, Validation) {
  std::mt19937_64 rng(51);
  const Problem p = make_problem({3, 8, 8}, 2, UniformBlock{2}, 2, rng);
  EXPECT_THROW(build_system(p.model, p.y, p.z, p.v, 0.0), ValidationError);
  EXPECT_THROW(build_system(p.model, p.y, p.z, cube_new(3, 8, 6, 0.0), 1.0), DimensionError);
  EXPECT_THROW(build_system(p.model, cube_new(3, 8, 8, 0.0), p.z, p.v, 1.0), DimensionError);
  EXPECT_THROW(build_system(p.model, p.y, cube_new(1, 8, 8, 0.0), p.v, 1.0), DimensionError);
}

TEST(Cg, ZeroC2ReducesToBandSolve) {
  std::mt19937_64 rng(52);
  const Problem p = make_problem({4, 6, 6}, 2, UniformBlock{2}, 2, rng);
  SylvesterSystem sys = build_system(p.model, p.y, p.z, p.v, 0.5);
  sys.blur = BlurOperator::from_response(Plane<Complex>::Zero(6, 6));
  const SylvesterSolution sol = solve_cg(sys, cube_new(4, 6, 6, 0.0), 1e-12, 200);
  EXPECT_TRUE(sol.converged);
  EXPECT_LT(oracle::rel_err(sol.x.matrix(), sys.c1.llt().solve(sys.c3.matrix())), 1e-10);
}

TEST(Cg, MatchesDenseOracle) {
  std::mt19937_64 rng(53);
  const Problem p = make_problem({3, 4, 4}, 2, GaussianKernel{0.8, 3}, 2, rng);
  const SylvesterSystem sys = build_system(p.model, p.y, p.z, p.v, 0.01);
  const SylvesterSolution sol = solve_cg(sys, cube_new(3, 4, 4, 0.0), 1e-12, 1000);
  EXPECT_TRUE(sol.converged);
  EXPECT_EQ(sol.method, SolveMethod::ConjugateGradient);
  EXPECT_LT(oracle::rel_err(sol.x.matrix(), dense_solution(sys)), 1e-8);
  EXPECT_LE(sol.residual, 1e-10);
}

TEST(Cg, WarmStartAtSolutionStopsImmediately) {
  std::mt19937_64 rng(54);
  const Problem p = make_problem({3, 8, 8}, 2, UniformBlock{2}, 2, rng);
  const SylvesterSystem sys = build_system(p.model, p.y, p.z, p.v, 0.01);
  const SylvesterSolution exact = solve_fast(sys);
  const SylvesterSolution warm = solve_cg(sys, exact.x, 1e-9, 1000);
  EXPECT_EQ(warm.iterations, 0);
  const SylvesterSolution cold = solve_cg(sys, cube_new(3, 8, 8, 0.0), 1e-9, 1000);
  EXPECT_GT(cold.iterations, 0);
  EXPECT_THROW(solve_cg(sys, cube_new(3, 8, 8, 0.0), 0.0, 10), ValidationError);
}

TEST(Cg, ReportsNonConvergence) {
  std::mt19937_64 rng(55);
  const Problem p = make_problem({4, 8, 8}, 2, GaussianKernel{1.0, 3}, 2, rng);
  const SylvesterSystem sys = build_system(p.model, p.y, p.z, p.v, 0.001);
  const SylvesterSolution sol = solve_cg(sys, cube_new(4, 8, 8, 0.0), 1e-14, 2);
  EXPECT_FALSE(sol.converged);
  EXPECT_EQ(sol.iterations, 2);
  EXPECT_LT(sol.residual, 1.0);
}

TEST(Fast, IdentityBlurFactorOne) {
  std::mt19937_64 rng(56);
  const Problem p = make_problem({4, 6, 6}, 1, UniformBlock{1}, 2, rng);
  const SylvesterSystem sys = build_system(p.model, p.y, p.z, p.v, 0.1);
  const SylvesterSolution sol = solve_fast(sys);
  Eigen::MatrixXd lhs = sys.c1;
  lhs.diagonal().array() += 1.0;
  EXPECT_LT(oracle::rel_err(sol.x.matrix(), lhs.llt().solve(sys.c3.matrix())), 1e-12);
}

TEST(Fast, AgreesWithDenseAndCg) {
  std::mt19937_64 rng(57);
  Eigen::MatrixXd k(3, 3);
  k << 1, 2, 0, 0, 3, 1, 2, 0, 1;
  for (const KernelSpec& spec : {KernelSpec{UniformBlock{2}}, KernelSpec{GaussianKernel{1.0, 5}},
                                 KernelSpec{CustomKernel{k, 0, 2}}}) {
    const Problem p = make_problem({4, 8, 8}, 2, spec, 2, rng);
    const SylvesterSystem sys = build_system(p.model, p.y, p.z, p.v, 0.001);
    const SylvesterSolution fast = solve_fast(sys);
    const Eigen::MatrixXd dense = dense_solution(sys);
    EXPECT_LT(oracle::rel_err(fast.x.matrix(), dense), 1e-8);
    EXPECT_LE(fast.residual, 1e-10);
    const SylvesterSolution cg = solve_cg(sys, cube_new(4, 8, 8, 0.0), 1e-12, 5000);
    EXPECT_LT(oracle::rel_err(fast.x.matrix(), cg.x.matrix()), 1e-6);
  }
}

TEST(Fast, NonZeroSamplingPhase) {
  std::mt19937_64 rng(58);
  Eigen::MatrixXd k(2, 3);
  k << 3, 1, 0, 0.5, 2, 7;
  for (const Downsampler d : {Downsampler(2, 1, 0), Downsampler(4, 3, 2), Downsampler(2, 1, 1)}) {
    const Problem p = make_problem({3, 8, 8}, d.factor, CustomKernel{k, 0, 0}, 2, rng, d);
    const SylvesterSystem sys = build_system(p.model, p.y, p.z, p.v, 0.01);
    const SylvesterSolution fast = solve_fast(sys);
    EXPECT_LT(oracle::rel_err(fast.x.matrix(), dense_solution(sys)), 1e-8);
    EXPECT_LE(fast.residual, 1e-10);
  }
}

TEST(Fast, RectangularGrid) {
  std::mt19937_64 rng(59);
  const Problem p = make_problem({3, 6, 8}, 2, GaussianKernel{0.7, 3}, 2, rng);
  const SylvesterSystem sys = build_system(p.model, p.y, p.z, p.v, 0.05);
  EXPECT_LT(oracle::rel_err(solve_fast(sys).x.matrix(), dense_solution(sys)), 1e-8);
}

TEST(Fast, LargeFactorResidualAndSpeed) {
  std::mt19937_64 rng(60);
  const DegradationModel m{BlurOperator(64, 64, UniformBlock{32}), Downsampler(32), default_srf(31)};
  const HsiCube x = oracle::random_cube({31, 64, 64}, rng, 0.0, 1.0);
  const Observation o = degrade(m, x);
  const SylvesterSystem sys = build_system(m, o.y, o.z, oracle::random_cube({31, 64, 64}, rng, 0.0, 1.0), 0.001);
  const auto t0 = std::chrono::steady_clock::now();
  const SylvesterSolution sol = solve_fast(sys);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LE(sol.residual, 1e-8);
  EXPECT_LT(secs, 1.0);
}

TEST(Fast, ResidualGrowsWithPerturbation) {
  std::mt19937_64 rng(61);
  const Problem p = make_problem({4, 8, 8}, 2, GaussianKernel{1.0, 3}, 2, rng);
  const SylvesterSystem sys = build_system(p.model, p.y, p.z, p.v, 0.01);
  const SylvesterSolution sol = solve_fast(sys);
  const HsiCube dir = oracle::random_cube({4, 8, 8}, rng);
  double prev = sol.residual;
  for (double eps : {1e-6, 1e-4, 1e-2, 1.0}) {
    const double r = sylvester_residual(sys, sol.x + eps * dir);
    EXPECT_GT(r, prev);
    prev = r;
  }
  EXPECT_NEAR(sylvester_residual(sys, cube_new(4, 8, 8, 0.0)), 1.0, 1e-15);
}

TEST(Fast, ScalingEquivariance) {
  std::mt19937_64 rng(62);
  const Problem p = make_problem({3, 8, 8}, 2, UniformBlock{2}, 2, rng);
  const SylvesterSystem sys = build_system(p.model, p.y, p.z, p.v, 0.01);
  SylvesterSystem scaled = sys;
  scaled.c3 = 3.5 * sys.c3;
  EXPECT_LT(oracle::rel_err(solve_fast(scaled).x.matrix(), 3.5 * solve_fast(sys).x.matrix()), 1e-12);
}

TEST(Fast, UnsupportedStructureFallsBackToCg) {
  std::mt19937_64 rng(63);
  const Problem p = make_problem({3, 8, 8}, 2, UniformBlock{2}, 2, rng);
  SylvesterSystem sys = build_system(p.model, p.y, p.z, p.v, 0.01);
  sys.blur = BlurOperator(4, 4, UniformBlock{2});
  EXPECT_THROW(solve_fast(sys), UnsupportedStructure);
  // blur grid mismatch also breaks the operator itself, so the fallback surfaces a dimension error
  EXPECT_THROW(solve(sys), DimensionError);

  SylvesterSystem odd = build_system(p.model, p.y, p.z, p.v, 0.01);
  odd.down = Downsampler(3);
  EXPECT_THROW(solve_fast(odd), UnsupportedStructure);

  const SylvesterSystem ok = build_system(p.model, p.y, p.z, p.v, 0.01);
  const SylvesterSolution s = solve(ok);
  EXPECT_EQ(s.method, SolveMethod::FastFrequency);
  EXPECT_STREQ(to_string(s.method), "fast-frequency");
}

TEST(Fast, ZeroRightHandSide) {
  const DegradationModel m{BlurOperator(8, 8, UniformBlock{2}), Downsampler(2), default_srf(6)};
  const SylvesterSystem sys =
      build_system(m, cube_new(6, 4, 4, 0.0), cube_new(3, 8, 8, 0.0), cube_new(6, 8, 8, 0.0), 0.01);
  const SylvesterSolution s = solve_fast(sys);
  EXPECT_EQ(s.x.matrix().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(s.residual, 0.0);
}
