#include "onf/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace onf {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;
constexpr double kPi = 3.14159265358979323846264338;

// Miller's downward recurrence, normalized with J_0 + 2*sum J_{2k} = 1.
// Fills J_0..J_nmax. Accuracy is set by the start order margin; +42 keeps
// the truncation error below double rounding for any x reachable here.
void jn_ladder(int nmax, double x, std::vector<double>& out) {
    out.assign(nmax + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return;
    }
    int start = nmax > static_cast<int>(x) ? nmax : static_cast<int>(x);
    start += 42 + static_cast<int>(std::sqrt(6.0 * start));
    if (start % 2) ++start;

    double fp = 0.0;            // f_{k+1}
    double fc = 1e-300;         // f_k
    double norm = 0.0;
    for (int k = start; k >= 1; --k) {
        double fm = (2.0 * k / x) * fc - fp;
        fp = fc;
        fc = fm;
        if (k - 1 <= nmax) out[k - 1] = fc;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * fc;
        if (std::fabs(fc) > 1e280) {
            fc *= 1e-280;
            fp *= 1e-280;
            norm *= 1e-280;
            for (double& v : out) v *= 1e-280;
        }
    }
    norm += out[0];
    // out currently holds f_{k}; J_0 = f_0 / (f_0 + 2 sum f_{2k}).
    // norm accumulated f_0 once via the final += (out[0] == f_0).
    for (double& v : out) v /= norm;
}

// K_0(x), K_1(x) for x <= 2: mu = 0 Temme series.
void k01_series(double x, double& k0, double& k1) {
    const double x2 = 0.5 * x;
    const double d = x2 * x2;
    double ff = -(kEulerGamma + std::log(x2));
    double p = 0.5, q = 0.5, c = 1.0;
    double sum0 = ff, sum1 = p;
    for (int i = 1; i < 200; ++i) {
        ff = (i * ff + p + q) / (static_cast<double>(i) * i);
        c *= d / i;
        p /= i;
        q /= i;
        const double del0 = c * ff;
        sum0 += del0;
        sum1 += c * (p - i * ff);
        if (std::fabs(del0) < std::fabs(sum0) * 1e-17) break;
    }
    k0 = sum0;
    k1 = 2.0 * sum1 / x;
}

// e^x K_0(x), e^x K_1(x) for x > 2: Steed's continued fraction (CF2, mu = 0).
void k01_cf2_scaled(double x, double& k0, double& k1) {
    const double a1 = 0.25;
    double b = 2.0 * (1.0 + x);
    double dd = 1.0 / b;
    double h = dd, delh = dd;
    double q1 = 0.0, q2 = 1.0;
    double a = -a1;
    double q = a1, c = a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i < 20000; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        dd = 1.0 / (b + a * dd);
        delh = (b * dd - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) < 1e-16) break;
    }
    h = a1 * h;
    k0 = std::sqrt(kPi / (2.0 * x)) / s;
    k1 = k0 * (x + 0.5 - h) / x;
}

void kn_ladder_scaled(int nmax, double x, std::vector<double>& out) {
    if (x <= 0.0) throw std::domain_error("bessel_k: x must be > 0");
    out.assign(nmax + 1 < 2 ? 2 : nmax + 1, 0.0);
    double k0, k1;
    if (x <= 2.0) {
        k01_series(x, k0, k1);
        const double e = std::exp(x);
        k0 *= e;
        k1 *= e;
    } else {
        k01_cf2_scaled(x, k0, k1);
    }
    out[0] = k0;
    if (nmax >= 1) out[1] = k1;
    double km = k0, kc = k1;
    for (int n = 1; n < nmax; ++n) {
        const double kp = km + (2.0 * n / x) * kc;
        km = kc;
        kc = kp;
        out[n + 1] = kp;
    }
}

} // namespace

double bessel_j(int n, double x) {
    if (n < 0) throw std::domain_error("bessel_j: order must be >= 0");
    if (x < 0) throw std::domain_error("bessel_j: x must be >= 0");
    std::vector<double> l;
    jn_ladder(n, x, l);
    return l[n];
}

void bessel_j_triplet(int n, double x, double& jnm1, double& jn, double& jnp1) {
    std::vector<double> l;
    jn_ladder(n + 1, x, l);
    jn = l[n];
    jnp1 = l[n + 1];
    jnm1 = n >= 1 ? l[n - 1] : -l[1];
}

double bessel_j_prime(int n, double x) {
    double a, b, c;
    bessel_j_triplet(n, x, a, b, c);
    return 0.5 * (a - c);
}

double bessel_k(int n, double x) {
    return bessel_k_scaled(n, x) * std::exp(-x);
}

double bessel_k_scaled(int n, double x) {
    if (n < 0) n = -n;
    std::vector<double> l;
    kn_ladder_scaled(n, x, l);
    return l[n];
}

void bessel_k_scaled_triplet(int n, double x, double& knm1, double& kn, double& knp1) {
    std::vector<double> l;
    kn_ladder_scaled(n + 1, x, l);
    kn = l[n];
    knp1 = l[n + 1];
    knm1 = n >= 1 ? l[n - 1] : l[1];
}

double bessel_k_prime_scaled(int n, double x) {
    double a, b, c;
    bessel_k_scaled_triplet(n, x, a, b, c);
    return -0.5 * (a + c);
}

double bessel_j_zero(int n, int m) {
    if (n < 0 || m < 1) throw std::domain_error("bessel_j_zero: need n >= 0, m >= 1");
    // McMahon two-term guess, then verified bracket + bisection.
    const double b = (m + 0.5 * n - 0.25) * kPi;
    const double mu = 4.0 * n * n;
    double guess = b - (mu - 1.0) / (8.0 * b)
                   - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * std::pow(8.0 * b, 3));
    double half = 0.5;
    double lo = guess - half, hi = guess + half;
    if (lo < 1e-6) lo = 1e-6;
    auto f = [n](double x) { return bessel_j(n, x); };
    for (int tries = 0; tries < 8 && f(lo) * f(hi) > 0.0; ++tries) {
        half *= 1.6;
        lo = guess - half;
        hi = guess + half;
        if (lo < 1e-6) lo = 1e-6;
    }
    double flo = f(lo);
    if (flo * f(hi) > 0.0) throw std::runtime_error("bessel_j_zero: bracket failed");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (flo * fm <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if (hi - lo < 1e-14 * hi) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace onf
