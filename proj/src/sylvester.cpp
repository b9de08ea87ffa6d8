#include "hsfuse/sylvester.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "hsfuse/fft.hpp"
#include "hsfuse/parallel.hpp"

namespace hsfuse {

const char* to_string(SolveMethod m) {
  return m == SolveMethod::FastFrequency ? "fast-frequency" : "conjugate-gradient";
}

SylvesterSystem build_system(const DegradationModel& model, const HsiCube& y, const HsiCube& z, const HsiCube& v,
                             double rho) {
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  const Dims hr = model.hr_dims();
  if (v.dims() != hr) throw DimensionError("V is " + v.dims().str() + ", model expects " + hr.str());
  if (y.dims() != model.lr_dims())
    throw DimensionError("Y is " + y.dims().str() + ", model expects " + model.lr_dims().str());
  if (z.dims() != model.rgb_dims())
    throw DimensionError("Z is " + z.dims().str() + ", model expects " + model.rgb_dims().str());

  const Eigen::MatrixXd& r = model.srf.matrix();
  Eigen::MatrixXd c1 = r.transpose() * r;
  c1.diagonal().array() += rho;

  HsiCube::Matrix c3 = srf_adjoint(model.srf, z).matrix();
  c3 += blur_adjoint(model.blur, upsample_adjoint(model.down, y, hr.height, hr.width)).matrix();
  c3 += rho * v.matrix();
  return SylvesterSystem{std::move(c1), model.blur, model.down, HsiCube(hr, std::move(c3)), rho};
}

HsiCube apply_c2(const SylvesterSystem& sys, const HsiCube& x) {
  return blur_adjoint(sys.blur, upsample_adjoint(sys.down, downsample(sys.down, blur_apply(sys.blur, x)),
                                                 x.height(), x.width()));
}

HsiCube sylvester_apply(const SylvesterSystem& sys, const HsiCube& x) {
  if (x.bands() != sys.c1.rows()) throw DimensionError("cube band count does not match C1");
  HsiCube out = apply_c2(sys, x);
  out.matrix() += sys.c1 * x.matrix();
  return out;
}

double sylvester_residual(const SylvesterSystem& sys, const HsiCube& x) {
  const double scale = std::max(norm(sys.c3), std::numeric_limits<double>::min());
  return norm(sylvester_apply(sys, x) - sys.c3) / scale;
}

SylvesterSolution solve_cg(const SylvesterSystem& sys, const HsiCube& x0, double tol, int max_iter) {
  if (!(tol > 0.0)) throw ValidationError("CG tolerance must be positive");
  if (x0.dims() != sys.c3.dims()) throw DimensionError("CG start point does not match C3");

  SylvesterSolution sol{x0, 0.0, SolveMethod::ConjugateGradient, true, 0};
  const double c3_norm = norm(sys.c3);
  if (c3_norm == 0.0) {
    sol.x = HsiCube(sys.c3.dims(), 0.0);
    return sol;
  }

  HsiCube x = x0;
  HsiCube r = sys.c3 - sylvester_apply(sys, x);
  HsiCube p = r;
  double rs = squared_norm(r);
  HsiCube best = x;
  double best_rs = rs;
  int it = 0;
  for (; it < max_iter && std::sqrt(rs) > tol * c3_norm; ++it) {
    const HsiCube ap = sylvester_apply(sys, p);
    const double curvature = dot(p, ap);
    if (!(curvature > 0.0)) break;
    const double alpha = rs / curvature;
    x.matrix() += alpha * p.matrix();
    r.matrix() -= alpha * ap.matrix();
    const double rs_next = squared_norm(r);
    p.matrix() = r.matrix() + (rs_next / rs) * p.matrix();
    rs = rs_next;
    if (rs < best_rs) {
      best_rs = rs;
      best = x;
    }
  }
  sol.iterations = it;
  sol.x = std::sqrt(rs) <= tol * c3_norm ? x : best;
  sol.residual = sylvester_residual(sys, sol.x);
  sol.converged = std::sqrt(rs) <= tol * c3_norm;
  return sol;
}

SylvesterSolution solve_fast(const SylvesterSystem& sys) {
  const Index bands = sys.c3.bands();
  const Index height = sys.c3.height();
  const Index width = sys.c3.width();
  const int s = sys.down.factor;
  if (sys.blur.height() != height || sys.blur.width() != width)
    throw UnsupportedStructure("blur grid does not match the image; no FFT diagonalization");
  if (height % s != 0 || width % s != 0)
    throw UnsupportedStructure("image is not divisible by the downsampling factor");
  if (sys.c1.rows() != bands || sys.c1.cols() != bands) throw DimensionError("C1 does not match band count");

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.c1);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of C1 failed");
  const Eigen::MatrixXd& q = eig.eigenvectors();
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > 0.0)) throw NumericalError("C1 is not positive definite");

  // Blur response with the sampling phase folded in: decimating at phase p equals
  // shifting by -p first, which multiplies frequency f by exp(+2 pi i f p / n).
  Plane<Complex> d = sys.blur.response();
  if (sys.down.phase_row != 0 || sys.down.phase_col != 0) {
    for (Index u = 0; u < height; ++u)
      for (Index v = 0; v < width; ++v) {
        const double angle = 2.0 * std::numbers::pi *
                             (static_cast<double>(u * sys.down.phase_row) / static_cast<double>(height) +
                              static_cast<double>(v * sys.down.phase_col) / static_cast<double>(width));
        d(u, v) *= std::polar(1.0, angle);
      }
  }

  const Index lr_h = height / s;
  const Index lr_w = width / s;
  Plane<double> group_power = Plane<double>::Zero(lr_h, lr_w);
  for (Index u = 0; u < height; ++u)
    for (Index v = 0; v < width; ++v) group_power(u % lr_h, v % lr_w) += std::norm(d(u, v));

  const HsiCube::Matrix c3_bar = q.transpose() * sys.c3.matrix();
  HsiCube::Matrix x_bar(bands, height * width);
  const double s2 = static_cast<double>(s) * static_cast<double>(s);

  parallel_for(bands, [&](Index l) {
    const double lam = lambda(l);
    Plane<Complex> c = Eigen::Map<const Plane<double>>(c3_bar.row(l).data(), height, width).cast<Complex>();
    fft2_inplace(c);
    for (Index i = 0; i < lr_h; ++i) {
      for (Index j = 0; j < lr_w; ++j) {
        Complex folded(0.0, 0.0);
        for (Index a = 0; a < s; ++a)
          for (Index b = 0; b < s; ++b) folded += d(i + a * lr_h, j + b * lr_w) * c(i + a * lr_h, j + b * lr_w);
        const Complex coef = folded / (lam * s2 + group_power(i, j));
        for (Index a = 0; a < s; ++a)
          for (Index b = 0; b < s; ++b) {
            const Index u = i + a * lr_h, v = j + b * lr_w;
            c(u, v) = (c(u, v) - std::conj(d(u, v)) * coef) / lam;
          }
      }
    }
    Plane<double> xl = ifft2_real(std::move(c));
    x_bar.row(l) = Eigen::Map<const Eigen::RowVectorXd>(xl.data(), xl.size());
  });

  SylvesterSolution sol{HsiCube(sys.c3.dims(), q * x_bar), 0.0, SolveMethod::FastFrequency, true, 0};
  sol.residual = sylvester_residual(sys, sol.x);
  return sol;
}

SylvesterSolution solve(const SylvesterSystem& sys, const HsiCube* warm_start) {
  try {
    return solve_fast(sys);
  } catch (const UnsupportedStructure&) {
    const HsiCube x0 = warm_start ? *warm_start : HsiCube(sys.c3.dims(), 0.0);
    return solve_cg(sys, x0, 1e-9, 10 * static_cast<int>(sys.c3.size()) + 100);
  }
}

}  // namespace hsfuse
