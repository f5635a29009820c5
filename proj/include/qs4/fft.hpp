#ifndef QS4_FFT_HPP
#define QS4_FFT_HPP

#include <complex>
#include <vector>

namespace qs4::detail {

// In-place unnormalized 2-D DFT of an m x m row-major array.
// sign = -1 forward (e^{-2 pi i jk/m}), +1 backward.
void fft2d(std::vector<std::complex<double>>& a, int m, int sign);

} // namespace qs4::detail

#endif
