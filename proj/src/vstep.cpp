#include "hsfuse/vstep.hpp"

#include <string>

#include "hsfuse/fft.hpp"
#include "hsfuse/parallel.hpp"

namespace hsfuse {
namespace {

TridiagMatrix gram_for(Index bands) {
  if (bands >= 2) return spectral_gram_tridiag(bands);
  TridiagMatrix t;
  t.diag = Eigen::VectorXd::Zero(bands);
  t.lower = t.upper = Eigen::VectorXd::Zero(0);
  return t;
}

void check_inputs(const HsiCube& x_next, const HsiCube& xt, const SpatialGradOp& lap, double mu_p, double nu_p) {
  if (x_next.dims() != xt.dims())
    throw DimensionError("V-step: X is " + x_next.dims().str() + ", prior is " + xt.dims().str());
  if (x_next.height() != lap.height() || x_next.width() != lap.width())
    throw DimensionError("V-step: gradient operator grid does not match " + x_next.dims().str());
  if (!lap.shared() && lap.stencil_count() != x_next.bands())
    throw DimensionError("V-step: per-band stencil count does not match band count");
  if (!(mu_p >= 0.0) || !(nu_p >= 0.0)) throw ValidationError("V-step weights must be non-negative");
}

}  // namespace

TridiagMatrix assemble_tf(const Eigen::VectorXd& lap_power, const TridiagMatrix& gram, double mu_p, double nu_p) {
  TridiagMatrix t;
  t.diag = Eigen::VectorXd::Ones(gram.size()) + mu_p * lap_power + nu_p * gram.diag;
  t.lower = nu_p * gram.lower;
  t.upper = nu_p * gram.upper;
  return t;
}

TridiagMatrix assemble_tf(double lap_value, const TridiagMatrix& gram, double mu_p, double nu_p) {
  if (!(lap_value >= 0.0)) throw ValidationError("Laplacian response value must be non-negative");
  return assemble_tf(Eigen::VectorXd::Constant(gram.size(), lap_value * lap_value), gram, mu_p, nu_p);
}

Eigen::VectorXcd thomas_solve(const TridiagMatrix& t, const Eigen::VectorXcd& rhs) {
  const Index n = t.size();
  if (rhs.size() != n) throw DimensionError("tridiagonal solve: right-hand side length mismatch");
  Eigen::VectorXd c_prime(n);
  Eigen::VectorXcd x(n);
  double denom = t.diag(0);
  c_prime(0) = n > 1 ? t.upper(0) / denom : 0.0;
  x(0) = rhs(0) / denom;
  for (Index i = 1; i < n; ++i) {
    denom = t.diag(i) - t.lower(i - 1) * c_prime(i - 1);
    c_prime(i) = i + 1 < n ? t.upper(i) / denom : 0.0;
    x(i) = (rhs(i) - t.lower(i - 1) * x(i - 1)) / denom;
  }
  for (Index i = n - 2; i >= 0; --i) x(i) -= c_prime(i) * x(i + 1);
  return x;
}

VStepSystem make_vstep_system(const HsiCube& x_next, const HsiCube& xt, const SpatialGradOp& lap, double mu_p,
                              double nu_p) {
  check_inputs(x_next, xt, lap, mu_p, nu_p);
  return VStepSystem{dft2_per_band(x_next), dft2_per_band(xt), &lap, gram_for(x_next.bands()), mu_p, nu_p};
}

Eigen::VectorXcd solve_frequency(const VStepSystem& sys, Index row, Index col) {
  const Index bands = sys.x_next.bands();
  if (row < 0 || row >= sys.x_next.height() || col < 0 || col >= sys.x_next.width())
    throw DimensionError("frequency index outside the grid");
  const Index p = row * sys.x_next.width() + col;
  Eigen::VectorXd power(bands);
  for (Index l = 0; l < bands; ++l) power(l) = sys.lap->power(l)(row, col);
  const TridiagMatrix t = assemble_tf(power, sys.gram, sys.mu_p, sys.nu_p);

  const Eigen::VectorXcd xf = sys.x_next.matrix().col(p);
  const Eigen::VectorXcd xtf = sys.xt.matrix().col(p);
  Eigen::VectorXcd rhs = xf + sys.mu_p * power.cwiseProduct(xtf);
  if (sys.nu_p != 0.0 && bands >= 2) {
    // E0^T E0 xt_f
    Eigen::VectorXcd g(bands);
    for (Index l = 0; l < bands; ++l) {
      Complex acc = sys.gram.diag(l) * xtf(l);
      if (l > 0) acc += sys.gram.lower(l - 1) * xtf(l - 1);
      if (l + 1 < bands) acc += sys.gram.upper(l) * xtf(l + 1);
      g(l) = acc;
    }
    rhs += sys.nu_p * g;
  }
  return thomas_solve(t, rhs);
}

HsiCube vstep(const HsiCube& x_next, const HsiCube& xt, const SpatialGradOp& lap, double mu_p, double nu_p) {
  check_inputs(x_next, xt, lap, mu_p, nu_p);
  if (mu_p == 0.0 && nu_p == 0.0) return x_next;

  const VStepSystem sys = make_vstep_system(x_next, xt, lap, mu_p, nu_p);
  FreqCube::Matrix v(x_next.bands(), x_next.pixels());
  const Index width = x_next.width();
  parallel_for(x_next.height(), [&](Index row) {
    for (Index col = 0; col < width; ++col) v.col(row * width + col) = solve_frequency(sys, row, col);
  });
  return idft2_per_band(FreqCube(x_next.dims(), std::move(v)));
}

double vstep_objective(const HsiCube& v, const HsiCube& x_next, const HsiCube& xt, const SpatialGradOp& lap,
                       double mu_p, double nu_p) {
  return squared_norm(x_next - v) + regularizer_value(lap, v, xt, mu_p, nu_p);
}

HsiCube vstep_gradient(const HsiCube& v, const HsiCube& x_next, const HsiCube& xt, const SpatialGradOp& lap,
                       double mu_p, double nu_p) {
  const HsiCube diff = v - xt;
  HsiCube g = v - x_next;
  g.matrix() += mu_p * laplacian_adjoint(lap, laplacian_apply(lap, diff)).matrix();
  if (diff.bands() >= 2) g.matrix() += nu_p * spectral_diff_adjoint(spectral_diff_apply(diff)).matrix();
  return g;
}

}  // namespace hsfuse
