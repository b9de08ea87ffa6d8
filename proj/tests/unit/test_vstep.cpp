#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace hsfuse;

using oracle::dense_vstep;

TEST(AssembleTf, NoRegularizationIsIdentity) {
  const TridiagMatrix t = assemble_tf(3.0, spectral_gram_tridiag(4), 0.0, 0.0);
  EXPECT_EQ(t.to_dense(), Eigen::MatrixXd::Identity(4, 4));
}

TEST(AssembleTf, DcWithUnitSpectralWeight) {
  const TridiagMatrix t = assemble_tf(0.0, spectral_gram_tridiag(3), 50.0, 1.0);
  EXPECT_EQ(t.diag, Eigen::Vector3d(2, 3, 2));
  EXPECT_EQ(t.lower, Eigen::Vector2d(-1, -1));
  EXPECT_EQ(t.upper, Eigen::Vector2d(-1, -1));
}

TEST(AssembleTf, SymmetricPositiveDefinite) {
  for (double lap : {0.0, 0.5, 4.0, 8.0}) {
    const Eigen::MatrixXd t = assemble_tf(lap, spectral_gram_tridiag(6), 50.0, 1.0).to_dense();
    EXPECT_EQ(t, t.transpose());
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t).eigenvalues().minCoeff(), 0.0);
  }
  EXPECT_THROW(assemble_tf(-1.0, spectral_gram_tridiag(3), 1.0, 1.0), ValidationError);
}

TEST(Thomas, MatchesDenseLu) {
  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Index b : {1, 2, 5, 9}) {
    Eigen::VectorXd power(b);
    for (Index i = 0; i < b; ++i) power(i) = 4.0 * (u(rng) + 1.0);
    const TridiagMatrix gram = b >= 2 ? spectral_gram_tridiag(b) : TridiagMatrix{Eigen::VectorXd::Zero(1), {}, {}};
    const TridiagMatrix t = assemble_tf(power, gram, 50.0, 1.0);
    Eigen::VectorXcd rhs(b);
    for (Index i = 0; i < b; ++i) rhs(i) = Complex(u(rng), u(rng));
    const Eigen::VectorXcd x = thomas_solve(t, rhs);
    const Eigen::VectorXcd ref = t.to_dense().cast<Complex>().partialPivLu().solve(rhs);
    EXPECT_LT((x - ref).norm(), 1e-12 * ref.norm());
    EXPECT_LE((t.to_dense().cast<Complex>() * x - rhs).norm(), 1e-10 * rhs.norm());
  }
}

TEST(SolveFrequency, Cases) {
  std::mt19937_64 rng(41);
  const HsiCube x = oracle::random_cube({5, 4, 4}, rng);
  const HsiCube xt = oracle::random_cube({5, 4, 4}, rng);
  const SpatialGradOp lap(4, 4);
  {
    const VStepSystem sys = make_vstep_system(x, xt, lap, 0.0, 0.0);
    for (Index r = 0; r < 4; ++r)
      for (Index c = 0; c < 4; ++c)
        EXPECT_EQ(solve_frequency(sys, r, c), Eigen::VectorXcd(sys.x_next.matrix().col(r * 4 + c)));
  }
  {
    const VStepSystem sys = make_vstep_system(xt, xt, lap, 50.0, 1.0);
    for (Index p = 0; p < 16; ++p)
      EXPECT_LT((solve_frequency(sys, p / 4, p % 4) - Eigen::VectorXcd(sys.xt.matrix().col(p))).norm(),
                1e-12 * (1.0 + sys.xt.matrix().col(p).norm()));
  }
  {
    // dense B x B oracle at every frequency
    const VStepSystem sys = make_vstep_system(x, xt, lap, 50.0, 1.0);
    const Eigen::MatrixXd e0 = oracle::e0_matrix(5);
    for (Index p = 0; p < 16; ++p) {
      const double pw = lap.power(0)(p / 4, p % 4);
      const Eigen::MatrixXd t = Eigen::MatrixXd::Identity(5, 5) * (1.0 + 50.0 * pw) + e0.transpose() * e0;
      const Eigen::VectorXcd xf = sys.x_next.matrix().col(p), xtf = sys.xt.matrix().col(p);
      const Eigen::VectorXcd rhs = xf + 50.0 * pw * xtf + (e0.transpose() * e0).cast<Complex>() * xtf;
      const Eigen::VectorXcd ref = t.cast<Complex>().lu().solve(rhs);
      EXPECT_LT((solve_frequency(sys, p / 4, p % 4) - ref).norm(), 1e-12 * ref.norm());
    }
  }
  const VStepSystem sys = make_vstep_system(x, xt, lap, 1.0, 1.0);
  EXPECT_THROW(solve_frequency(sys, 4, 0), DimensionError);
}

TEST(Vstep, NoRegularizationReturnsInputExactly) {
  std::mt19937_64 rng(42);
  const HsiCube x = oracle::random_cube({3, 6, 6}, rng);
  const HsiCube xt = oracle::random_cube({3, 6, 6}, rng);
  EXPECT_EQ(vstep(x, xt, SpatialGradOp(6, 6), 0.0, 0.0).matrix(), x.matrix());
}

TEST(Vstep, ConsensusFixedPoint) {
  std::mt19937_64 rng(43);
  const HsiCube xt = oracle::random_cube({4, 6, 6}, rng);
  const HsiCube v = vstep(xt, xt, SpatialGradOp(6, 6), 50.0, 1.0);
  EXPECT_LT((v.matrix() - xt.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Vstep, MatchesDenseMinimizerAndDescends) {
  std::mt19937_64 rng(44);
  const HsiCube x = oracle::random_cube({3, 6, 6}, rng);
  const HsiCube xt = oracle::random_cube({3, 6, 6}, rng);
  const SpatialGradOp lap(6, 6);
  const HsiCube v = vstep(x, xt, lap, 50.0, 1.0);
  const HsiCube ref = dense_vstep(x, xt, 50.0, 1.0);
  EXPECT_LT(oracle::rel_err(v.matrix(), ref.matrix()), 1e-8);
  const double f = vstep_objective(v, x, xt, lap, 50.0, 1.0);
  EXPECT_LE(f, vstep_objective(x, x, xt, lap, 50.0, 1.0));
  EXPECT_LE(f, vstep_objective(xt, x, xt, lap, 50.0, 1.0));
  const HsiCube g = vstep_gradient(v, x, xt, lap, 50.0, 1.0);
  EXPECT_LE(norm(g), 1e-8 * (norm(x) + norm(xt)));
}

TEST(Vstep, LocalMinimalitySpotCheck) {
  std::mt19937_64 rng(45);
  const HsiCube x = oracle::random_cube({4, 8, 8}, rng);
  const HsiCube xt = oracle::random_cube({4, 8, 8}, rng);
  const SpatialGradOp lap(8, 8);
  const HsiCube v = vstep(x, xt, lap, 50.0, 1.0);
  const double f = vstep_objective(v, x, xt, lap, 50.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const HsiCube delta = oracle::random_cube(x.dims(), rng, -1e-3, 1e-3);
    EXPECT_LE(f, vstep_objective(v + delta, x, xt, lap, 50.0, 1.0));
  }
}

TEST(Vstep, SerialAndParallelAreBitIdentical) {
  std::mt19937_64 rng(46);
  const HsiCube x = oracle::random_cube({5, 16, 12}, rng);
  const HsiCube xt = oracle::random_cube({5, 16, 12}, rng);
  const SpatialGradOp lap(16, 12);
  set_thread_count(1);
  const HsiCube serial = vstep(x, xt, lap, 50.0, 1.0);
  set_thread_count(4);
  const HsiCube parallel = vstep(x, xt, lap, 50.0, 1.0);
  set_thread_count(0);
  EXPECT_EQ(serial.matrix(), parallel.matrix());
}

TEST(Vstep, SingleBandAndErrors) {
  std::mt19937_64 rng(47);
  const HsiCube x = oracle::random_cube({1, 5, 5}, rng);
  const HsiCube xt = oracle::random_cube({1, 5, 5}, rng);
  const HsiCube v = vstep(x, xt, SpatialGradOp(5, 5), 10.0, 1.0);
  EXPECT_LT(oracle::rel_err(v.matrix(), dense_vstep(x, xt, 10.0, 1.0).matrix()), 1e-10);
  EXPECT_THROW(vstep(x, cube_new(1, 5, 4, 0.0), SpatialGradOp(5, 5), 1.0, 1.0), DimensionError);
  EXPECT_THROW(vstep(x, xt, SpatialGradOp(5, 5), -1.0, 1.0), ValidationError);
}
