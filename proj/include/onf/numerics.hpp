#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace onf {

// Bisection on a bracketing interval [lo, hi]; f(lo) and f(hi) must differ in
// sign. Returns the midpoint of the final bracket.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter = 240);

// Adaptive Simpson quadrature.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-9, double abs_tol = 0.0, int max_depth = 40);

// Gauss-Legendre nodes/weights on [-1, 1], cached per n.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

// Fixed-order Gauss-Legendre integral on [a, b].
double gauss_integrate(const std::function<double(double)>& f, double a, double b,
                       int n = 48);

// Natural cubic spline over strictly increasing abscissae.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;
    double derivative(double x) const;
    bool empty() const { return x_.empty(); }
    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

private:
    std::vector<double> x_, y_, m_;  // m_: second derivatives
    std::size_t segment(double x) const;
};

// splitmix64: cheap counter-keyed generator for reproducible per-sample noise.
std::uint64_t splitmix64(std::uint64_t z);

// Two independent standard normal deviates derived from (seed, counter).
std::pair<double, double> counter_gaussians(std::uint64_t seed, std::uint64_t counter);

// Run fn(i) for i in [0, n) on up to n_threads workers.
void parallel_for(std::size_t n, int n_threads, const std::function<void(std::size_t)>& fn);

} // namespace onf
