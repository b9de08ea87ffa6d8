#include "hsfuse/synth.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace hsfuse {
namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

std::vector<double> gaussian_taps(double sigma, Index max_radius) {
  if (sigma <= 0.0) return {1.0};
  const Index radius = std::min<Index>(static_cast<Index>(std::ceil(3.0 * sigma)), max_radius);
  std::vector<double> taps(static_cast<size_t>(2 * radius + 1));
  double total = 0.0;
  for (Index i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * static_cast<double>(i * i) / (sigma * sigma));
    taps[static_cast<size_t>(i + radius)] = w;
    total += w;
  }
  for (double& t : taps) t /= total;
  return taps;
}

// Separable circular smoothing of a row-major height x width field.
Eigen::VectorXd smooth_field(const Eigen::VectorXd& field, Index height, Index width, double sigma) {
  const auto row_taps = gaussian_taps(sigma, (width - 1) / 2);
  const auto col_taps = gaussian_taps(sigma, (height - 1) / 2);
  const Index rr = static_cast<Index>(row_taps.size() / 2);
  const Index cr = static_cast<Index>(col_taps.size() / 2);
  Eigen::VectorXd tmp(field.size());
  for (Index r = 0; r < height; ++r)
    for (Index c = 0; c < width; ++c) {
      double acc = 0.0;
      for (Index k = -rr; k <= rr; ++k) acc += row_taps[static_cast<size_t>(k + rr)] * field(r * width + (c + k + width) % width);
      tmp(r * width + c) = acc;
    }
  Eigen::VectorXd out(field.size());
  for (Index r = 0; r < height; ++r)
    for (Index c = 0; c < width; ++c) {
      double acc = 0.0;
      for (Index k = -cr; k <= cr; ++k) acc += col_taps[static_cast<size_t>(k + cr)] * tmp(((r + k + height) % height) * width + c);
      out(r * width + c) = acc;
    }
  return out;
}

}  // namespace

void SceneSpec::validate() const {
  if (bands < 1) throw ValidationError("scene needs at least one band");
  if (height < 4 || width < 4) throw ValidationError("scene must be at least 4x4 pixels");
  if (endmembers < 1 || endmembers > bands)
    throw ValidationError("endmember count " + std::to_string(endmembers) + " must lie in [1, bands=" +
                          std::to_string(bands) + "]");
  if (!(smoothness >= 0.0)) throw ValidationError("smoothness must be non-negative");
}

Eigen::MatrixXd generate_endmembers(const SceneSpec& spec) {
  spec.validate();
  auto rng = stream(spec.seed, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd m(spec.bands, spec.endmembers);
  const auto taps = gaussian_taps(2.0, spec.bands);
  const Index radius = static_cast<Index>(taps.size() / 2);
  for (Index j = 0; j < spec.endmembers; ++j) {
    // positive increments with a random dominant exponent give varied curve shapes
    const double shape = 1.0 + 4.0 * unit(rng);
    Eigen::VectorXd noise(spec.bands);
    for (Index i = 0; i < spec.bands; ++i) noise(i) = std::pow(unit(rng), shape) + 1e-3;
    Eigen::VectorXd curve(spec.bands);
    double running = 0.0;
    for (Index i = 0; i < spec.bands; ++i) {
      double smoothed = 0.0, weight = 0.0;
      for (Index k = -radius; k <= radius; ++k) {
        if (i + k < 0 || i + k >= spec.bands) continue;
        smoothed += taps[static_cast<size_t>(k + radius)] * noise(i + k);
        weight += taps[static_cast<size_t>(k + radius)];
      }
      running += smoothed / weight;
      curve(i) = running;
    }
    // reverse half of the curves so the set is not uniformly increasing
    if (unit(rng) < 0.5) curve.reverseInPlace();
    m.col(j) = curve / curve.maxCoeff();
  }
  return m;
}

Eigen::MatrixXd generate_abundances(const SceneSpec& spec) {
  spec.validate();
  auto rng = stream(spec.seed, 2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Index n = spec.height * spec.width;
  Eigen::MatrixXd fields(spec.endmembers, n);
  for (Index j = 0; j < spec.endmembers; ++j) {
    Eigen::VectorXd white(n);
    for (Index i = 0; i < n; ++i) white(i) = gauss(rng);
    Eigen::VectorXd f = smooth_field(white, spec.height, spec.width, spec.smoothness);
    f.array() -= f.mean();
    const double sd = std::sqrt(f.squaredNorm() / static_cast<double>(n));
    if (sd > 0.0) f /= sd;
    fields.row(j) = f.transpose();
  }
  constexpr double sharpness = 2.0;
  Eigen::MatrixXd a(spec.endmembers, n);
  for (Index i = 0; i < n; ++i) {
    const double peak = fields.col(i).maxCoeff();
    Eigen::VectorXd e = (sharpness * (fields.col(i).array() - peak)).exp();
    a.col(i) = e / e.sum();
  }
  return a;
}

HsiCube generate_scene(const SceneSpec& spec) {
  const Eigen::MatrixXd m = generate_endmembers(spec);
  const Eigen::MatrixXd a = generate_abundances(spec);
  HsiCube::Matrix x = m * a;
  const double peak = x.maxCoeff();
  if (peak > 0.0) x /= peak;
  return HsiCube(Dims{spec.bands, spec.height, spec.width}, std::move(x));
}

}  // namespace hsfuse
