#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace sei::fft {

using Complex = std::complex<double>;

/// In-place 2-D DFT of a row-major rows x cols array. The forward transform
/// uses exp(-2*pi*i*k*n/N) and no scaling; the inverse applies 1/(rows*cols).
void dft2(std::vector<Complex>& data, std::size_t rows, std::size_t cols, bool inverse = false);

/// Forward 2-D DFT of a real array.
std::vector<Complex> dft2_real(const std::vector<double>& data, std::size_t rows,
                               std::size_t cols);

/// Signed frequency index of bin k for an N-point transform: k for k <= N/2,
/// k - N otherwise.
inline long signed_bin(std::size_t k, std::size_t n) {
    return k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace sei::fft
