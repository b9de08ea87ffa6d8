#pragma once

#include <string>

#include "hsfuse/cube.hpp"

namespace hsfuse {

enum class PsnrMode {
  MeanPerBand,  ///< mean over bands of 10 log10(1 / mse_b)
  GlobalMse,    ///< 10 log10(1 / mse) over the whole cube
};

inline constexpr double kPsnrCap = 99.0;

struct MetricReport {
  double rmse = 0.0;   ///< on the 0-255 scale
  double psnr = 0.0;   ///< dB, peak 1.0, capped at kPsnrCap
  double sam = 0.0;    ///< degrees, mean over pixels with non-zero spectra
  double ergas = 0.0;  ///< (100 / s) sqrt(mean_b (rmse_b / mean_b)^2)
  double ssim = 0.0;   ///< mean per-band SSIM
  Index ergas_skipped_bands = 0;  ///< reference bands with mean < 1e-6, left out of ERGAS
};

struct MetricOptions {
  PsnrMode psnr_mode = PsnrMode::MeanPerBand;
};

MetricReport evaluate(const HsiCube& x_hat, const HsiCube& x_ref, int s, const MetricOptions& opts = {});

double rmse_255(const HsiCube& x_hat, const HsiCube& x_ref);
double psnr(const HsiCube& x_hat, const HsiCube& x_ref, PsnrMode mode = PsnrMode::MeanPerBand);
double sam_degrees(const HsiCube& x_hat, const HsiCube& x_ref);
double ergas(const HsiCube& x_hat, const HsiCube& x_ref, int s, Index* skipped = nullptr);
/// Gaussian-window SSIM (11x11, sigma 1.5, K1 0.01, K2 0.03, range 1) over valid windows.
double ssim_plane(const Plane<double>& a, const Plane<double>& b);
double ssim(const HsiCube& x_hat, const HsiCube& x_ref);

std::string to_json(const MetricReport& r);
/// "rmse,psnr,ergas,sam,ssim"
std::string csv_header();
std::string to_csv_row(const MetricReport& r);

}  // namespace hsfuse
