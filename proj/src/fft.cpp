#include "onf/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace onf {

void fft(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft: size must be a power of two");
    // bit reversal
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& v : a) v /= static_cast<double>(n);
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

MagnitudeSpectrum magnitude_spectrum(const std::vector<double>& x, double dz,
                                     int pad_factor) {
    if (x.empty()) throw std::invalid_argument("magnitude_spectrum: empty signal");
    const std::size_t nfft = next_pow2(x.size() * static_cast<std::size_t>(pad_factor));
    std::vector<std::complex<double>> buf(nfft, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
    fft(buf);
    MagnitudeSpectrum out;
    out.mag.resize(nfft / 2 + 1);
    for (std::size_t i = 0; i <= nfft / 2; ++i) out.mag[i] = std::abs(buf[i]);
    out.df = 1.0 / (static_cast<double>(nfft) * dz);
    return out;
}

} // namespace onf
