#include "hsfuse/fft.hpp"

#include <map>
#include <mutex>
#include <tuple>

#include <fftw3.h>

#include "hsfuse/parallel.hpp"

namespace hsfuse {
namespace {

static_assert(sizeof(Complex) == sizeof(fftw_complex));

// In-place plans keyed by shape and direction. Planning is not thread-safe in FFTW,
// execution with fftw_execute_dft is. ESTIMATE keeps the chosen algorithm, and so the
// rounding, identical from run to run.
fftw_plan plan_for(Index rows, Index cols, bool inverse) {
  static std::mutex mutex;
  static std::map<std::tuple<Index, Index, bool>, fftw_plan> plans;
  const std::lock_guard<std::mutex> lock(mutex);
  auto& plan = plans[{rows, cols, inverse}];
  if (!plan) {
    auto* scratch = fftw_alloc_complex(static_cast<size_t>(rows * cols));
    plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), scratch, scratch,
                            inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (!plan) throw NumericalError("FFT planning failed");
  }
  return plan;
}

void transform(Plane<Complex>& plane, bool inverse) {
  if (plane.size() == 0) return;
  auto* data = reinterpret_cast<fftw_complex*>(plane.data());
  fftw_execute_dft(plan_for(plane.rows(), plane.cols(), inverse), data, data);
  if (inverse) plane /= static_cast<double>(plane.size());
}

}  // namespace

void fft2_inplace(Plane<Complex>& plane) { transform(plane, false); }

void ifft2_inplace(Plane<Complex>& plane) { transform(plane, true); }

Plane<Complex> fft2(const Plane<double>& plane) {
  Plane<Complex> out = plane.cast<Complex>();
  fft2_inplace(out);
  return out;
}

Plane<double> ifft2_real(Plane<Complex> plane) {
  ifft2_inplace(plane);
  const double peak = std::max(1.0, plane.real().cwiseAbs().maxCoeff());
  const double residue = plane.imag().cwiseAbs().maxCoeff();
  if (residue > 1e-6 * peak)
    throw SymmetryError("inverse DFT has imaginary residue " + std::to_string(residue) +
                        "; spectrum is not conjugate-symmetric");
  return plane.real();
}

FreqCube dft2_per_band(const HsiCube& cube) {
  FreqCube::Matrix out(cube.bands(), cube.pixels());
  parallel_for(cube.bands(), [&](Index l) {
    Plane<Complex> p = cube.plane(l).cast<Complex>();
    fft2_inplace(p);
    out.row(l) = Eigen::Map<const Eigen::RowVectorXcd>(p.data(), p.size());
  });
  return FreqCube(cube.dims(), std::move(out));
}

HsiCube idft2_per_band(const FreqCube& fc) {
  HsiCube::Matrix out(fc.bands(), fc.pixels());
  parallel_for(fc.bands(), [&](Index l) {
    Plane<double> p = ifft2_real(fc.plane(l));
    out.row(l) = Eigen::Map<const Eigen::RowVectorXd>(p.data(), p.size());
  });
  return HsiCube(fc.dims(), std::move(out));
}

}  // namespace hsfuse
