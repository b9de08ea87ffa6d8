#pragma once

#include "hsfuse/cube.hpp"

namespace hsfuse {

// DFT convention: the forward transform is unnormalized, the inverse carries 1/(H*W).
// Coefficient (u, v) of a band sits at plane position (u, v); (0, 0) is DC.

/// Forward 2D DFT of one plane, in place.
void fft2_inplace(Plane<Complex>& plane);
/// Inverse 2D DFT of one plane (scaled by 1/(H*W)), in place.
void ifft2_inplace(Plane<Complex>& plane);

Plane<Complex> fft2(const Plane<double>& plane);

/// Per-band forward 2D DFT.
FreqCube dft2_per_band(const HsiCube& cube);

/// Per-band inverse 2D DFT of a conjugate-symmetric spectrum. Imaginary residue up to
/// 1e-6 (relative to max(1, peak real magnitude)) is discarded; anything larger throws
/// SymmetryError.
HsiCube idft2_per_band(const FreqCube& fc);

/// Inverse transform of a single plane with the same symmetry check.
Plane<double> ifft2_real(Plane<Complex> plane);

}  // namespace hsfuse
