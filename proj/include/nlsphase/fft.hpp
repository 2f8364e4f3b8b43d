#pragma once

#include <complex>
#include <span>

namespace nlsphase {

using cplx = std::complex<double>;

// Unnormalized complex DFT, out-of-place or in-place. Plans are cached per
// (length, direction) and created with FFTW_ESTIMATE so results are
// reproducible run to run.
void fft_forward(std::span<const cplx> in, std::span<cplx> out);
void fft_backward(std::span<const cplx> in, std::span<cplx> out);

}  // namespace nlsphase
