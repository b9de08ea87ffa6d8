#include "hsfuse/gradient.hpp"

#include <string>

#include "hsfuse/fft.hpp"
#include "hsfuse/parallel.hpp"

namespace hsfuse {

Eigen::Matrix3d laplacian_stencil() {
  Eigen::Matrix3d k;
  k << 0, -1, 0, -1, 4, -1, 0, -1, 0;
  return k;
}

Eigen::MatrixXd TridiagMatrix::to_dense() const {
  const Index n = size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = diag(i);
  for (Index i = 0; i + 1 < n; ++i) {
    m(i + 1, i) = lower(i);
    m(i, i + 1) = upper(i);
  }
  return m;
}

SpatialGradOp::SpatialGradOp(Index height, Index width, const Eigen::Matrix3d& stencil)
    : height_(height), width_(width) {
  if (height < 1 || width < 1) throw DimensionError("gradient operator grid must be at least 1x1");
  add_stencil(stencil);
}

SpatialGradOp::SpatialGradOp(Index height, Index width, const std::vector<Eigen::Matrix3d>& per_band)
    : height_(height), width_(width) {
  if (height < 1 || width < 1) throw DimensionError("gradient operator grid must be at least 1x1");
  if (per_band.empty()) throw ValidationError("at least one stencil is required");
  for (const auto& s : per_band) add_stencil(s);
}

void SpatialGradOp::add_stencil(const Eigen::Matrix3d& stencil) {
  Plane<double> k = Plane<double>::Zero(height_, width_);
  for (Index a = 0; a < 3; ++a)
    for (Index b = 0; b < 3; ++b) {
      const Index r = ((a - 1) % height_ + height_) % height_;
      const Index c = ((b - 1) % width_ + width_) % width_;
      k(r, c) += stencil(a, b);
    }
  Plane<Complex> response = fft2(k);
  power_.push_back(response.cwiseAbs2());
  responses_.push_back(std::move(response));
}

namespace {

HsiCube convolve(const SpatialGradOp& op, const HsiCube& x, bool conjugate) {
  if (x.height() != op.height() || x.width() != op.width())
    throw DimensionError("gradient operator grid does not match cube " + x.dims().str());
  if (!op.shared() && op.stencil_count() != x.bands())
    throw DimensionError("per-band stencil count does not match cube bands");
  HsiCube::Matrix out(x.bands(), x.pixels());
  parallel_for(x.bands(), [&](Index l) {
    Plane<Complex> p = x.plane(l).cast<Complex>();
    fft2_inplace(p);
    if (conjugate)
      p.array() *= op.response(l).array().conjugate();
    else
      p.array() *= op.response(l).array();
    Plane<double> r = ifft2_real(std::move(p));
    out.row(l) = Eigen::Map<const Eigen::RowVectorXd>(r.data(), r.size());
  });
  return HsiCube(x.dims(), std::move(out));
}

}  // namespace

HsiCube laplacian_apply(const SpatialGradOp& op, const HsiCube& x) { return convolve(op, x, false); }

HsiCube laplacian_adjoint(const SpatialGradOp& op, const HsiCube& x) { return convolve(op, x, true); }

HsiCube spectral_diff_apply(const HsiCube& x) {
  const Index b = x.bands();
  if (b < 2) throw DimensionError("spectral difference needs at least 2 bands");
  const auto& m = x.matrix();
  return HsiCube(Dims{b - 1, x.height(), x.width()}, m.bottomRows(b - 1) - m.topRows(b - 1));
}

HsiCube spectral_diff_adjoint(const HsiCube& y) {
  const Index b = y.bands() + 1;
  HsiCube::Matrix out = HsiCube::Matrix::Zero(b, y.pixels());
  out.bottomRows(b - 1) += y.matrix();
  out.topRows(b - 1) -= y.matrix();
  return HsiCube(Dims{b, y.height(), y.width()}, std::move(out));
}

TridiagMatrix spectral_gram_tridiag(Index bands) {
  if (bands < 2) throw DimensionError("spectral Gram matrix needs at least 2 bands");
  TridiagMatrix t;
  t.diag = Eigen::VectorXd::Constant(bands, 2.0);
  t.diag(0) = t.diag(bands - 1) = 1.0;
  t.lower = t.upper = Eigen::VectorXd::Constant(bands - 1, -1.0);
  return t;
}

double regularizer_value(const HsiCube& x, const HsiCube& xt, double mu, double nu) {
  return regularizer_value(SpatialGradOp(x.height(), x.width()), x, xt, mu, nu);
}

double regularizer_value(const SpatialGradOp& op, const HsiCube& x, const HsiCube& xt, double mu, double nu) {
  if (!(mu >= 0.0) || !(nu >= 0.0)) throw ValidationError("regularizer weights must be non-negative");
  const HsiCube diff = x - xt;
  double value = 0.0;
  if (mu > 0.0) value += mu * squared_norm(laplacian_apply(op, diff));
  if (nu > 0.0 && diff.bands() >= 2) value += nu * squared_norm(spectral_diff_apply(diff));
  return value;
}

}  // namespace hsfuse
