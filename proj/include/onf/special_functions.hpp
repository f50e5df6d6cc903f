#pragma once

// Cylinder functions J_n and K_n of integer order, their derivatives, and
// zeros of J_n. Self-contained (Miller downward recurrence for J; series +
// Steed continued fraction for K) and accurate to ~1e-14 relative over the
// argument ranges a step-index mode solver visits.

namespace onf {

// J_n(x), n >= 0, x >= 0.
double bessel_j(int n, double x);

// J_{n-1}, J_n, J_{n+1} in one downward pass (J_{-1} = -J_1).
void bessel_j_triplet(int n, double x, double& jnm1, double& jn, double& jnp1);

// d/dx J_n(x)
double bessel_j_prime(int n, double x);

// K_n(x), n >= 0, x > 0. Underflows to 0 for x beyond ~700.
double bessel_k(int n, double x);

// e^x K_n(x); safe for large x.
double bessel_k_scaled(int n, double x);

// K_{n-1}, K_n, K_{n+1}, scaled by e^x (K_{-1} = K_1).
void bessel_k_scaled_triplet(int n, double x, double& knm1, double& kn, double& knp1);

// d/dx K_n(x) scaled by e^x.
double bessel_k_prime_scaled(int n, double x);

// m-th positive zero of J_n (m >= 1).
double bessel_j_zero(int n, int m);

} // namespace onf
