#pragma once

#include <complex>
#include <vector>

namespace onf {

// In-place radix-2 Cooley-Tukey; size must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool inverse = false);

std::size_t next_pow2(std::size_t n);

// |DFT| of the real signal x zero-padded to pad_factor * |x| (next power of
// two). Returns magnitudes for bins 0..N/2 and the bin spacing in 1/dz units.
struct MagnitudeSpectrum {
    std::vector<double> mag;
    double df = 0.0;
};
MagnitudeSpectrum magnitude_spectrum(const std::vector<double>& x, double dz,
                                     int pad_factor = 4);

} // namespace onf
