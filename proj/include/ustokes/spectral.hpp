#pragma once

#include <complex>
#include <vector>

namespace ustokes {

/* Full complex DFT helpers for n x n periodic slices (row-major, iy outer).
   Plans are created with FFTW_ESTIMATE under a global lock, so calls are
   deterministic and safe from concurrent threads. */

std::vector<std::complex<double>> forward_spectrum(const std::vector<double>& slice,
                                                   int n);
/* inverse transform including the 1/n^2 normalization */
std::vector<double> inverse_slice(const std::vector<std::complex<double>>& spec, int n);

/* signed frequency of index a on the box [-L, L): (pi/L) * (a <= n/2 ? a : a-n) */
double spectral_freq(int a, int n, double L);

}  // namespace ustokes
