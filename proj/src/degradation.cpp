#include "hsfuse/degradation.hpp"

#include <cmath>
#include <random>
#include <string>

#include "hsfuse/fft.hpp"
#include "hsfuse/parallel.hpp"

namespace hsfuse {
namespace {

Plane<double> embed_kernel(Index height, Index width, const Eigen::MatrixXd& weights, int anchor_row,
                           int anchor_col) {
  Plane<double> k = Plane<double>::Zero(height, width);
  for (Index a = 0; a < weights.rows(); ++a) {
    for (Index b = 0; b < weights.cols(); ++b) {
      const Index r = ((a - anchor_row) % height + height) % height;
      const Index c = ((b - anchor_col) % width + width) % width;
      k(r, c) += weights(a, b);
    }
  }
  return k;
}

Eigen::MatrixXd kernel_weights(const KernelSpec& spec, int& anchor_row, int& anchor_col) {
  if (const auto* block = std::get_if<UniformBlock>(&spec)) {
    if (block->size < 1) throw ValidationError("uniform block size must be >= 1");
    anchor_row = anchor_col = block->size - 1;
    return Eigen::MatrixXd::Constant(block->size, block->size, 1.0);
  }
  if (const auto* gauss = std::get_if<GaussianKernel>(&spec)) {
    if (!(gauss->sigma > 0.0)) throw ValidationError("gaussian sigma must be positive");
    if (gauss->support < 1 || gauss->support % 2 == 0)
      throw ValidationError("gaussian support must be a positive odd integer");
    const int half = gauss->support / 2;
    Eigen::MatrixXd w(gauss->support, gauss->support);
    for (int i = 0; i < gauss->support; ++i)
      for (int j = 0; j < gauss->support; ++j) {
        const double di = i - half, dj = j - half;
        w(i, j) = std::exp(-(di * di + dj * dj) / (2.0 * gauss->sigma * gauss->sigma));
      }
    anchor_row = anchor_col = half;
    return w;
  }
  const auto& custom = std::get<CustomKernel>(spec);
  if (custom.weights.size() == 0) throw ValidationError("custom kernel is empty");
  if (!custom.weights.allFinite()) throw ValidationError("custom kernel has non-finite weights");
  anchor_row = custom.anchor_row < 0 ? static_cast<int>(custom.weights.rows() / 2) : custom.anchor_row;
  anchor_col = custom.anchor_col < 0 ? static_cast<int>(custom.weights.cols() / 2) : custom.anchor_col;
  return custom.weights;
}

HsiCube filter(const Plane<Complex>& response, const HsiCube& x, bool conjugate) {
  if (x.height() != response.rows() || x.width() != response.cols())
    throw DimensionError("blur is " + std::to_string(response.rows()) + "x" + std::to_string(response.cols()) +
                         " but cube is " + x.dims().str());
  HsiCube::Matrix out(x.bands(), x.pixels());
  parallel_for(x.bands(), [&](Index l) {
    Plane<Complex> p = x.plane(l).cast<Complex>();
    fft2_inplace(p);
    if (conjugate)
      p.array() *= response.array().conjugate();
    else
      p.array() *= response.array();
    Plane<double> r = ifft2_real(std::move(p));
    out.row(l) = Eigen::Map<const Eigen::RowVectorXd>(r.data(), r.size());
  });
  return HsiCube(x.dims(), std::move(out));
}

}  // namespace

BlurOperator::BlurOperator(Plane<double> kernel, Plane<Complex> response)
    : kernel_(std::move(kernel)), response_(std::move(response)) {}

BlurOperator::BlurOperator(Index height, Index width, const KernelSpec& spec) {
  if (height < 1 || width < 1) throw DimensionError("blur grid must be at least 1x1");
  int ar = 0, ac = 0;
  Eigen::MatrixXd w = kernel_weights(spec, ar, ac);
  const double total = w.sum();
  if (std::abs(total) < 1e-12) throw ValidationError("blur kernel sums to zero");
  w /= total;
  kernel_ = embed_kernel(height, width, w, ar, ac);
  response_ = fft2(kernel_);
}

BlurOperator BlurOperator::from_response(Plane<Complex> response) {
  const Index h = response.rows(), w = response.cols();
  if (h < 1 || w < 1) throw DimensionError("blur response grid is empty");
  const double scale = std::max(1.0, response.cwiseAbs().maxCoeff());
  for (Index u = 0; u < h; ++u)
    for (Index v = 0; v < w; ++v)
      if (std::abs(response(u, v) - std::conj(response((h - u) % h, (w - v) % w))) > 1e-9 * scale)
        throw ValidationError("blur response is not conjugate-symmetric (kernel would be complex)");
  Plane<double> kernel = ifft2_real(response);
  return BlurOperator(std::move(kernel), std::move(response));
}

BlurOperator BlurOperator::identity(Index height, Index width) {
  return BlurOperator(height, width, UniformBlock{1});
}

Downsampler::Downsampler(int s, int phase_r, int phase_c) : factor(s), phase_row(phase_r), phase_col(phase_c) {
  if (s < 1) throw ValidationError("downsampling factor must be >= 1");
  if (phase_r < 0 || phase_r >= s || phase_c < 0 || phase_c >= s)
    throw ValidationError("downsampling phase must lie in [0, s)");
}

SpectralResponse::SpectralResponse(Eigen::MatrixXd r) : r_(std::move(r)) {
  if (r_.rows() < 1 || r_.cols() < 1) throw DimensionError("spectral response is empty");
  if (r_.rows() >= r_.cols())
    throw DimensionError("spectral response must map B channels to fewer (b < B) channels");
  if (!r_.allFinite() || (r_.array() < 0.0).any())
    throw ValidationError("spectral response entries must be finite and non-negative");
  for (Index i = 0; i < r_.rows(); ++i) {
    const double s = r_.row(i).sum();
    if (!(s > 0.0)) throw ValidationError("spectral response row " + std::to_string(i) + " sums to zero");
    r_.row(i) /= s;
  }
}

SpectralResponse default_srf(Index bands, double wl_min, double wl_max) {
  if (bands < 4) throw ValidationError("default SRF needs at least 4 hyperspectral bands");
  const double centres[3] = {450.0, 550.0, 650.0};
  constexpr double sigma = 40.0;
  Eigen::MatrixXd r(3, bands);
  for (Index j = 0; j < bands; ++j) {
    const double wl = wl_min + (wl_max - wl_min) * static_cast<double>(j) / static_cast<double>(bands - 1);
    for (int i = 0; i < 3; ++i) {
      const double d = (wl - centres[i]) / sigma;
      r(i, j) = std::exp(-0.5 * d * d);
    }
  }
  return SpectralResponse(std::move(r));
}

Dims DegradationModel::lr_dims() const {
  const int s = down.factor;
  if (blur.height() % s != 0 || blur.width() % s != 0)
    throw DimensionError("image size is not divisible by the downsampling factor " + std::to_string(s));
  return {srf.in_bands(), blur.height() / s, blur.width() / s};
}

HsiCube blur_apply(const BlurOperator& op, const HsiCube& x) { return filter(op.response(), x, false); }

HsiCube blur_adjoint(const BlurOperator& op, const HsiCube& x) { return filter(op.response(), x, true); }

HsiCube downsample(const Downsampler& d, const HsiCube& x) {
  const int s = d.factor;
  if (x.height() % s != 0 || x.width() % s != 0)
    throw DimensionError("cube " + x.dims().str() + " is not divisible by factor " + std::to_string(s));
  const Dims out{x.bands(), x.height() / s, x.width() / s};
  HsiCube y(out, 0.0);
  for (Index l = 0; l < out.bands; ++l)
    for (Index i = 0; i < out.height; ++i)
      for (Index j = 0; j < out.width; ++j) y(l, i, j) = x(l, s * i + d.phase_row, s * j + d.phase_col);
  return y;
}

HsiCube upsample_adjoint(const Downsampler& d, const HsiCube& y, Index hr_height, Index hr_width) {
  const int s = d.factor;
  if (hr_height % s != 0 || hr_width % s != 0 || y.height() * s != hr_height || y.width() * s != hr_width)
    throw DimensionError("low-resolution cube " + y.dims().str() + " does not match " +
                         std::to_string(hr_height) + "x" + std::to_string(hr_width) + " at factor " +
                         std::to_string(s));
  HsiCube x(Dims{y.bands(), hr_height, hr_width}, 0.0);
  for (Index l = 0; l < y.bands(); ++l)
    for (Index i = 0; i < y.height(); ++i)
      for (Index j = 0; j < y.width(); ++j) x(l, s * i + d.phase_row, s * j + d.phase_col) = y(l, i, j);
  return x;
}

HsiCube srf_apply(const SpectralResponse& r, const HsiCube& x) {
  if (x.bands() != r.in_bands())
    throw DimensionError("SRF expects " + std::to_string(r.in_bands()) + " bands, cube has " +
                         std::to_string(x.bands()));
  return HsiCube(Dims{r.out_bands(), x.height(), x.width()}, r.matrix() * x.matrix());
}

HsiCube srf_adjoint(const SpectralResponse& r, const HsiCube& z) {
  if (z.bands() != r.out_bands())
    throw DimensionError("SRF adjoint expects " + std::to_string(r.out_bands()) + " bands, cube has " +
                         std::to_string(z.bands()));
  return HsiCube(Dims{r.in_bands(), z.height(), z.width()}, r.matrix().transpose() * z.matrix());
}

Observation degrade(const DegradationModel& model, const HsiCube& x) {
  if (x.dims() != model.hr_dims())
    throw DimensionError("degrade: cube " + x.dims().str() + " does not match model " + model.hr_dims().str());
  return Observation{downsample(model.down, blur_apply(model.blur, x)), srf_apply(model.srf, x)};
}

HsiCube add_noise(const HsiCube& x, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ValidationError("noise sigma must be non-negative");
  if (sigma == 0.0) return x;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  HsiCube out = x;
  for (Index i = 0; i < out.size(); ++i) out.data()[i] += noise(rng);
  return out;
}

}  // namespace hsfuse
