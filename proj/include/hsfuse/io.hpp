#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>

#include "hsfuse/cube.hpp"
#include "hsfuse/degradation.hpp"

namespace hsfuse {

enum class Dtype { F32, F64 };

const char* to_string(Dtype d);
Dtype parse_dtype(const std::string& s);

/**
 * Cube container layout:
 *
 *   "HSRC"                          4 bytes magic
 *   {"bands":..,"height":..,...}\n  one-line JSON header
 *   payload                         band-major little-endian f32 or f64 values
 *
 * Header keys: bands, height, width, dtype ("f32" | "f64"), layout ("band-major"),
 * and an optional scale [lo, hi] recording the value range at export.
 */
struct CubeHeader {
  Dims dims;
  Dtype dtype = Dtype::F64;
  std::optional<std::array<double, 2>> scale;
};

void save_cube(const std::filesystem::path& path, const HsiCube& cube, Dtype dtype = Dtype::F64);
HsiCube load_cube(const std::filesystem::path& path);
CubeHeader read_cube_header(const std::filesystem::path& path);

/// SRF table: header "band,<name0>,...", one row per hyperspectral channel, b value
/// columns (R transposed). Rows of R are normalized on load.
SpectralResponse load_srf_csv(const std::filesystem::path& path);
void save_srf_csv(const std::filesystem::path& path, const SpectralResponse& srf);

/// Band whose centre is nearest to `wavelength` on a grid of `bands` channels spread
/// uniformly over [wl_min, wl_max]. Zero-based.
Index band_for_wavelength(double wavelength, Index bands, double wl_min = 400.0, double wl_max = 700.0);

/// Writes |x_hat - x_ref| of one band as an 8-bit binary PGM (P5). Pixel value is
/// floor(255 * err / max_error + 0.5), clamped to 255.
void export_error_map(const HsiCube& x_hat, const HsiCube& x_ref, Index band, const std::filesystem::path& path,
                      double max_error = 0.1);

}  // namespace hsfuse
