#pragma once

#include <complex>
#include <vector>

namespace fourlat {

// Unnormalized complex DFT over a row-major d-dimensional array,
//   out[q] = sum_p in[p] * exp(sign * 2*pi*i * <p,q>/n)   (per axis)
// sign = -1 forward, +1 backward. Transforms in place.
//
// Backed by FFTW. Plans are cached per (shape, sign) and creation is
// serialized; execution itself is safe to call from worker threads.
void fft_unnormalized(std::complex<double>* data, const std::vector<int>& shape, int sign);

} // namespace fourlat
