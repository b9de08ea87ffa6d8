#include "hsfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hsfuse/parallel.hpp"

namespace hsfuse {
namespace {

void check_pair(const HsiCube& a, const HsiCube& b) {
  if (a.dims() != b.dims()) throw DimensionError("metric inputs differ: " + a.dims().str() + " vs " + b.dims().str());
}

double capped_psnr(double mse) {
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

Eigen::MatrixXd gaussian_window(Index size, double sigma) {
  Eigen::MatrixXd w(size, size);
  const double c = 0.5 * static_cast<double>(size - 1);
  for (Index i = 0; i < size; ++i)
    for (Index j = 0; j < size; ++j) {
      const double di = static_cast<double>(i) - c, dj = static_cast<double>(j) - c;
      w(i, j) = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
    }
  return w / w.sum();
}

}  // namespace

double rmse_255(const HsiCube& x_hat, const HsiCube& x_ref) {
  check_pair(x_hat, x_ref);
  return 255.0 * std::sqrt((x_hat.matrix() - x_ref.matrix()).squaredNorm() / static_cast<double>(x_ref.size()));
}

double psnr(const HsiCube& x_hat, const HsiCube& x_ref, PsnrMode mode) {
  check_pair(x_hat, x_ref);
  const auto diff = (x_hat.matrix() - x_ref.matrix()).eval();
  if (mode == PsnrMode::GlobalMse) return capped_psnr(diff.squaredNorm() / static_cast<double>(x_ref.size()));
  double total = 0.0;
  for (Index l = 0; l < x_ref.bands(); ++l)
    total += capped_psnr(diff.row(l).squaredNorm() / static_cast<double>(x_ref.pixels()));
  return total / static_cast<double>(x_ref.bands());
}

double sam_degrees(const HsiCube& x_hat, const HsiCube& x_ref) {
  check_pair(x_hat, x_ref);
  double total = 0.0;
  Index counted = 0;
  for (Index p = 0; p < x_ref.pixels(); ++p) {
    const Eigen::VectorXd a = x_hat.matrix().col(p);
    const Eigen::VectorXd b = x_ref.matrix().col(p);
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) continue;
    // angle between unit vectors, stable near 0 and pi
    const Eigen::VectorXd ua = a / na, ub = b / nb;
    total += 2.0 * std::atan2((ua - ub).norm(), (ua + ub).norm());
    ++counted;
  }
  if (counted == 0) return 0.0;
  return total / static_cast<double>(counted) * 180.0 / std::numbers::pi;
}

double ergas(const HsiCube& x_hat, const HsiCube& x_ref, int s, Index* skipped) {
  check_pair(x_hat, x_ref);
  if (s < 1) throw ValidationError("ERGAS resolution factor must be >= 1");
  double total = 0.0;
  Index used = 0, dropped = 0;
  const double n = static_cast<double>(x_ref.pixels());
  for (Index l = 0; l < x_ref.bands(); ++l) {
    const double mean = x_ref.matrix().row(l).sum() / n;
    if (mean < 1e-6) {
      ++dropped;
      continue;
    }
    const double rmse_b = std::sqrt((x_hat.matrix().row(l) - x_ref.matrix().row(l)).squaredNorm() / n);
    total += (rmse_b / mean) * (rmse_b / mean);
    ++used;
  }
  if (skipped) *skipped = dropped;
  if (used == 0) return 0.0;
  return 100.0 / static_cast<double>(s) * std::sqrt(total / static_cast<double>(used));
}

double ssim_plane(const Plane<double>& a, const Plane<double>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("SSIM planes differ in size");
  constexpr double c1 = (0.01 * 1.0) * (0.01 * 1.0);
  constexpr double c2 = (0.03 * 1.0) * (0.03 * 1.0);
  Index size = std::min<Index>({11, a.rows(), a.cols()});
  if (size % 2 == 0) --size;
  const Eigen::MatrixXd w = gaussian_window(size, 1.5);

  double total = 0.0;
  Index windows = 0;
  for (Index r = 0; r + size <= a.rows(); ++r)
    for (Index c = 0; c + size <= a.cols(); ++c) {
      const auto pa = a.block(r, c, size, size);
      const auto pb = b.block(r, c, size, size);
      // every moment goes through the same expression so identical inputs give exactly 1
      const double mu_a = (w.array() * pa.array()).sum();
      const double mu_b = (w.array() * pb.array()).sum();
      const double var_a = (w.array() * pa.array() * pa.array()).sum() - mu_a * mu_a;
      const double var_b = (w.array() * pb.array() * pb.array()).sum() - mu_b * mu_b;
      const double cov = (w.array() * pa.array() * pb.array()).sum() - mu_a * mu_b;
      total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      ++windows;
    }
  return total / static_cast<double>(windows);
}

double ssim(const HsiCube& x_hat, const HsiCube& x_ref) {
  check_pair(x_hat, x_ref);
  std::vector<double> per_band(static_cast<size_t>(x_ref.bands()));
  parallel_for(x_ref.bands(), [&](Index l) {
    per_band[static_cast<size_t>(l)] = ssim_plane(x_hat.plane(l), x_ref.plane(l));
  });
  double total = 0.0;
  for (double v : per_band) total += v;
  return total / static_cast<double>(per_band.size());
}

MetricReport evaluate(const HsiCube& x_hat, const HsiCube& x_ref, int s, const MetricOptions& opts) {
  check_pair(x_hat, x_ref);
  if (s < 1) throw ValidationError("resolution factor must be >= 1");
  MetricReport r;
  r.rmse = rmse_255(x_hat, x_ref);
  r.psnr = psnr(x_hat, x_ref, opts.psnr_mode);
  r.sam = sam_degrees(x_hat, x_ref);
  r.ergas = ergas(x_hat, x_ref, s, &r.ergas_skipped_bands);
  r.ssim = ssim(x_hat, x_ref);
  return r;
}

std::string to_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["rmse"] = r.rmse;
  j["psnr"] = r.psnr;
  j["ergas"] = r.ergas;
  j["sam"] = r.sam;
  j["ssim"] = r.ssim;
  j["ergas_skipped_bands"] = r.ergas_skipped_bands;
  return j.dump();
}

std::string csv_header() { return "rmse,psnr,ergas,sam,ssim"; }

std::string to_csv_row(const MetricReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.rmse << ',' << r.psnr << ',' << r.ergas << ',' << r.sam << ',' << r.ssim;
  return os.str();
}

}  // namespace hsfuse
