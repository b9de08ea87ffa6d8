#include "hsfuse/priors.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "hsfuse/io.hpp"

namespace hsfuse {
namespace {

struct Tap {
  Index lo;
  Index hi;
  double w_hi;
};

// Interpolation taps along one axis of length lr * s.
std::vector<Tap> axis_taps(Index lr, int s) {
  std::vector<Tap> taps(static_cast<size_t>(lr * s));
  for (Index m = 0; m < lr * s; ++m) {
    const double t = (static_cast<double>(m) - 0.5 * (s - 1)) / static_cast<double>(s);
    const double clamped = std::clamp(t, 0.0, static_cast<double>(lr - 1));
    const Index lo = std::min(static_cast<Index>(std::floor(clamped)), lr - 1);
    const Index hi = std::min(lo + 1, lr - 1);
    taps[static_cast<size_t>(m)] = Tap{lo, hi, clamped - static_cast<double>(lo)};
  }
  return taps;
}

}  // namespace

HsiCube bilinear_upsample(const HsiCube& y, int s) {
  if (s < 1) throw ValidationError("upsampling factor must be >= 1");
  const auto rows = axis_taps(y.height(), s);
  const auto cols = axis_taps(y.width(), s);
  HsiCube x(Dims{y.bands(), y.height() * s, y.width() * s}, 0.0);
  for (Index l = 0; l < y.bands(); ++l)
    for (Index r = 0; r < x.height(); ++r) {
      const Tap& tr = rows[static_cast<size_t>(r)];
      for (Index c = 0; c < x.width(); ++c) {
        const Tap& tc = cols[static_cast<size_t>(c)];
        const double top = (1.0 - tc.w_hi) * y(l, tr.lo, tc.lo) + tc.w_hi * y(l, tr.lo, tc.hi);
        const double bottom = (1.0 - tc.w_hi) * y(l, tr.hi, tc.lo) + tc.w_hi * y(l, tr.hi, tc.hi);
        x(l, r, c) = (1.0 - tr.w_hi) * top + tr.w_hi * bottom;
      }
    }
  return x;
}

HsiCube spectral_backproject(const HsiCube& x, const HsiCube& z, const SpectralResponse& srf) {
  if (x.bands() != srf.in_bands() || z.bands() != srf.out_bands() || x.height() != z.height() ||
      x.width() != z.width())
    throw DimensionError("back-projection: " + x.dims().str() + " and " + z.dims().str() + " do not fit the SRF");
  const Eigen::MatrixXd& r = srf.matrix();
  const Eigen::LDLT<Eigen::MatrixXd> gram(r * r.transpose());
  if (gram.info() != Eigen::Success) throw NumericalError("R R^T is singular");
  const HsiCube::Matrix residual = z.matrix() - r * x.matrix();
  Eigen::MatrixXd correction = gram.solve(Eigen::MatrixXd(residual));
  return HsiCube(x.dims(), x.matrix() + r.transpose() * correction);
}

HsiCube make_prior(const PriorSource& src, const HsiCube& y, const HsiCube& z, const DegradationModel& model) {
  const Dims hr = model.hr_dims();
  if (const auto* file = std::get_if<ExternalFile>(&src)) {
    HsiCube prior = load_cube(file->path);
    if (prior.dims() != hr)
      throw DimensionError("prior file " + file->path.string() + " is " + prior.dims().str() + ", expected " +
                           hr.str());
    return prior;
  }
  if (const auto* oracle = std::get_if<GroundTruthOracle>(&src)) {
    if (oracle->truth.dims() != hr) throw DimensionError("ground-truth prior does not match " + hr.str());
    return oracle->truth;
  }
  if (y.dims() != model.lr_dims() || z.dims() != model.rgb_dims())
    throw DimensionError("observations do not match the degradation model");
  return spectral_backproject(bilinear_upsample(y, model.down.factor), z, model.srf);
}

}  // namespace hsfuse
