#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "onf/fiber.hpp"

namespace onf {

double v_number(const FiberSpec& fiber, double radius);

enum class ModeClass { TE, TM, Hybrid };

// Residual of the exact step-index eigenvalue equation at n_eff.
// TE:  J1(u)/(u J0(u)) + K1(w)/(w K0(w))
// TM:  n1^2 J1(u)/(u J0(u)) + n2^2 K1(w)/(w K0(w))
// Hybrid (nu >= 1): (g + h)(g + (n2/n1)^2 h) - nu^2 (beta/(k n1))^2 (1/u^2 + 1/w^2)^2
//   with g = J'nu/(u Jnu), h = K'nu/(w Knu).
double characteristic_fn(const FiberSpec& fiber, double radius, ModeClass cls, int nu,
                         double n_eff);

// Cylindrical field components at one point; transverse parts are real in the
// chosen gauge, longitudinal parts lead by 90 degrees.
struct FieldPoint {
    std::complex<double> er, ephi, ez;
    std::complex<double> ex, ey;  // Cartesian transverse components
};

// Real radial envelopes of the six field components (phi dependence removed).
struct RadialAmplitudes {
    double er, ephi, ez, hr, hphi, hz;
};

class ModeSolution {
public:
    ModeId mode;
    double radius = 0.0;
    double n_eff = 0.0;
    double beta = 0.0;
    double u = 0.0;
    double w = 0.0;

    RadialAmplitudes radial(double r) const;
    FieldPoint field(double r, double phi) const;

    // circumferential average of |E|^2 just inside the surface, unit power
    double surface_avg_intensity() const;

    double coeff_A() const { return A_; }
    double coeff_B() const { return B_; }

private:
    friend ModeSolution solve_mode(const FiberSpec&, double, const ModeId&);
    FiberSpec fiber_;
    double omega_ = 0.0;
    double A_ = 0.0, B_ = 0.0, C_ = 0.0, D_ = 0.0;  // Jz/Kz expansion amplitudes
    void normalize_unit_power();
    double axial_power() const;
};

// Solve the requested mode at the given radius (|dn_eff| < 1e-12). Throws
// ModeBelowCutoff when not guided.
ModeSolution solve_mode(const FiberSpec& fiber, double radius, const ModeId& mode);

// Cutoff V-number; throws ModeBelowCutoff("no cutoff") for HE11.
double cutoff_v(const FiberSpec& fiber, const ModeId& mode);
double cutoff_radius(const FiberSpec& fiber, const ModeId& mode);

// All guided modes at the radius, descending n_eff, parities expanded.
std::vector<ModeId> list_guided_modes(const FiberSpec& fiber, double radius);

// Cladding radius at which the core-guided LP11 family reaches core cutoff
// (upper-bound estimate of the observed core-escape point).
double core_escape_radius(const FiberSpec& fiber);

} // namespace onf
