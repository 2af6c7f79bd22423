#pragma once

#include <complex>
#include <vector>

namespace stokes {

/// Forward / inverse complex DFT (FFTW, unnormalized forward; inverse divides
/// by n). Plans are cached per size and guarded by a mutex; execution is safe
/// to call from one thread per array.
void fft_forward(std::vector<std::complex<double>>& data);
void fft_inverse(std::vector<std::complex<double>>& data);

/// In-place 2D DST-I of an n x m row-major array (FFTW RODFT00).
/// Unnormalized: applying it twice multiplies by 4(n+1)(m+1).
void dst2_inplace(std::vector<double>& data, int rows, int cols);

}  // namespace stokes
