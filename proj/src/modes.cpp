#include "onf/modes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "onf/numerics.hpp"
#include "onf/special_functions.hpp"

namespace onf {

namespace {

const char* family_str(ModeFamily f) {
    switch (f) {
        case ModeFamily::HE: return "HE";
        case ModeFamily::EH: return "EH";
        case ModeFamily::TE: return "TE";
        case ModeFamily::TM: return "TM";
    }
    return "?";
}

struct CoreCladParams {
    double u, w;
};

CoreCladParams uw_of(const FiberSpec& f, double a, double n_eff) {
    const double k = f.k();
    const double u2 = (f.n_core * f.n_core - n_eff * n_eff) * a * a * k * k;
    const double w2 = (n_eff * n_eff - f.n_clad * f.n_clad) * a * a * k * k;
    return {std::sqrt(std::max(u2, 0.0)), std::sqrt(std::max(w2, 0.0))};
}

double g_term(int nu, double u) {
    double jm, j0, jp;
    bessel_j_triplet(nu, u, jm, j0, jp);
    return 0.5 * (jm - jp) / (u * j0);
}

double h_term(int nu, double w) {
    double km, k0, kp;
    bessel_k_scaled_triplet(nu, w, km, k0, kp);
    return -0.5 * (km + kp) / (w * k0);
}

// Factored hybrid dispersion branches: sign = +1 selects HE, -1 selects EH.
double hybrid_branch(const FiberSpec& f, double a, int nu, double n_eff, int sign) {
    const auto [u, w] = uw_of(f, a, n_eff);
    const double n1 = f.n_core, n2 = f.n_clad;
    const double g = g_term(nu, u);
    const double h = h_term(nu, w);
    const double C = (n1 * n1 + n2 * n2) / (2.0 * n1 * n1);
    const double D = (n1 * n1 - n2 * n2) / (2.0 * n1 * n1);
    const double inv2 = 1.0 / (u * u) + 1.0 / (w * w);
    const double b = n_eff / n1;
    const double R = D * D * h * h + nu * nu * b * b * inv2 * inv2;
    return g + C * h + sign * std::sqrt(R);
}

double te_fn(const FiberSpec& f, double a, double n_eff) {
    const auto [u, w] = uw_of(f, a, n_eff);
    double jm, j0, jp, km, k0, kp;
    bessel_j_triplet(1, u, jm, j0, jp);
    bessel_k_scaled_triplet(1, w, km, k0, kp);
    (void)jp;
    (void)kp;
    // jm = J0(u), km = K0(w)
    return j0 / (u * jm) + k0 / (w * km);
}

double tm_fn(const FiberSpec& f, double a, double n_eff) {
    const auto [u, w] = uw_of(f, a, n_eff);
    double jm, j0, jp, km, k0, kp;
    bessel_j_triplet(1, u, jm, j0, jp);
    bessel_k_scaled_triplet(1, w, km, k0, kp);
    (void)jp;
    (void)kp;
    return f.n_core * f.n_core * j0 / (u * jm) + f.n_clad * f.n_clad * k0 / (w * km);
}

double neff_of_u(const FiberSpec& f, double a, double u) {
    const double ak = a * f.k();
    return std::sqrt(f.n_core * f.n_core - (u / ak) * (u / ak));
}

bool is_guided(const FiberSpec& f, double V, const ModeId& mode) {
    if (mode.family == ModeFamily::HE && mode.azimuthal == 1 && mode.radial == 1)
        return true;  // fundamental mode, no cutoff
    return V > cutoff_v(f, mode);
}

// Dispersion function in u for the pole-free interval of the requested mode.
std::function<double(double)> scan_fn(const FiberSpec& f, double a, const ModeId& mode) {
    switch (mode.family) {
        case ModeFamily::TE:
            return [f, a](double u) { return te_fn(f, a, neff_of_u(f, a, u)); };
        case ModeFamily::TM:
            return [f, a](double u) { return tm_fn(f, a, neff_of_u(f, a, u)); };
        case ModeFamily::HE:
            return [f, a, nu = mode.azimuthal](double u) {
                return hybrid_branch(f, a, nu, neff_of_u(f, a, u), +1);
            };
        case ModeFamily::EH:
            return [f, a, nu = mode.azimuthal](double u) {
                return hybrid_branch(f, a, nu, neff_of_u(f, a, u), -1);
            };
    }
    throw std::logic_error("scan_fn: bad family");
}

// Pole-free u interval (between consecutive zeros of the relevant J) that
// contains the requested root: HE_num lives in interval m, EH_num in m+1,
// TE/TM_0m in (j0_m, j0_{m+1}).
std::pair<double, double> root_interval(const ModeId& mode) {
    const int nu = mode.hybrid() ? mode.azimuthal : 0;
    const int m = mode.radial;
    int idx;  // interval index: I_1 = (0, j_{nu,1}), I_k = (j_{nu,k-1}, j_{nu,k})
    switch (mode.family) {
        case ModeFamily::HE: idx = m; break;
        case ModeFamily::EH: idx = m + 1; break;
        default: idx = m + 1; break;  // TE/TM: (j_{0,m}, j_{0,m+1})
    }
    const double lo = idx == 1 ? 0.0 : bessel_j_zero(nu, idx - 1);
    const double hi = bessel_j_zero(nu, idx);
    return {lo, hi};
}

} // namespace

std::string ModeId::name() const {
    std::ostringstream os;
    os << family_str(family) << azimuthal << radial;
    if (parity == Parity::Even) os << 'e';
    if (parity == Parity::Odd) os << 'o';
    return os.str();
}

ModeId ModeId::parse(const std::string& s) {
    if (s.size() < 4) throw std::invalid_argument("ModeId::parse: bad name '" + s + "'");
    ModeId id;
    const std::string fam = s.substr(0, 2);
    if (fam == "HE") id.family = ModeFamily::HE;
    else if (fam == "EH") id.family = ModeFamily::EH;
    else if (fam == "TE") id.family = ModeFamily::TE;
    else if (fam == "TM") id.family = ModeFamily::TM;
    else throw std::invalid_argument("ModeId::parse: bad family in '" + s + "'");
    id.azimuthal = s[2] - '0';
    id.radial = s[3] - '0';
    id.parity = Parity::None;
    if (id.hybrid()) {
        id.parity = Parity::Even;
        if (s.size() > 4) {
            if (s[4] == 'o') id.parity = Parity::Odd;
            else if (s[4] != 'e')
                throw std::invalid_argument("ModeId::parse: bad parity in '" + s + "'");
        }
    } else if (s.size() > 4) {
        throw std::invalid_argument("ModeId::parse: TE/TM take no parity: '" + s + "'");
    }
    id.validate();
    return id;
}

double v_number(const FiberSpec& fiber, double radius) {
    fiber.validate();
    if (radius < 0.0) throw std::invalid_argument("v_number: radius must be >= 0");
    const double na = std::sqrt(fiber.n_core * fiber.n_core - fiber.n_clad * fiber.n_clad);
    return radius * fiber.k() * na;
}

double characteristic_fn(const FiberSpec& fiber, double radius, ModeClass cls, int nu,
                         double n_eff) {
    fiber.validate();
    if (!(n_eff > fiber.n_clad && n_eff < fiber.n_core))
        throw std::domain_error("characteristic_fn: n_eff outside (n_clad, n_core)");
    switch (cls) {
        case ModeClass::TE: return te_fn(fiber, radius, n_eff);
        case ModeClass::TM: return tm_fn(fiber, radius, n_eff);
        case ModeClass::Hybrid: break;
    }
    if (nu < 1) throw std::invalid_argument("characteristic_fn: hybrid needs nu >= 1");
    // product of the two branch factors = (g+h)(g + (n2/n1)^2 h) - RHS
    const auto [u, w] = uw_of(fiber, radius, n_eff);
    const double n1 = fiber.n_core, n2 = fiber.n_clad;
    const double g = g_term(nu, u);
    const double h = h_term(nu, w);
    const double r = (n2 * n2) / (n1 * n1);
    const double inv2 = 1.0 / (u * u) + 1.0 / (w * w);
    const double b = n_eff / n1;
    return (g + h) * (g + r * h) - nu * nu * b * b * inv2 * inv2;
}

double cutoff_v(const FiberSpec& fiber, const ModeId& mode) {
    fiber.validate();
    mode.validate();
    const int nu = mode.azimuthal, m = mode.radial;
    switch (mode.family) {
        case ModeFamily::TE:
        case ModeFamily::TM:
            return bessel_j_zero(0, m);
        case ModeFamily::EH:
            return bessel_j_zero(nu, m);
        case ModeFamily::HE:
            break;
    }
    if (nu == 1) {
        if (m == 1)
            throw ModeBelowCutoff("HE11 has no cutoff (guided at all radii)");
        return bessel_j_zero(1, m - 1);
    }
    // HE_num, nu >= 2: (nu-1)(n1^2+n2^2) J_{nu-1}(V) = n2^2 V J_nu(V), m-th root
    const double n1 = fiber.n_core, n2 = fiber.n_clad;
    auto fn = [&](double V) {
        return (nu - 1) * (n1 * n1 + n2 * n2) * bessel_j(nu - 1, V) -
               n2 * n2 * V * bessel_j(nu, V);
    };
    int found = 0;
    double lo = 1e-4, flo = fn(lo);
    for (double V = lo + 0.02; V < 220.0; V += 0.02) {
        const double fv = fn(V);
        if (flo * fv < 0.0) {
            ++found;
            if (found == m) return bisect(fn, V - 0.02, V, 1e-13);
        }
        flo = fv;
    }
    throw std::runtime_error("cutoff_v: root scan exhausted for " + mode.name());
}

double cutoff_radius(const FiberSpec& fiber, const ModeId& mode) {
    const double vc = cutoff_v(fiber, mode);
    const double na = std::sqrt(fiber.n_core * fiber.n_core - fiber.n_clad * fiber.n_clad);
    return vc * fiber.wavelength / (2.0 * M_PI * na);
}

ModeSolution solve_mode(const FiberSpec& fiber, double radius, const ModeId& mode) {
    fiber.validate();
    mode.validate();
    const double V = v_number(fiber, radius);
    if (!is_guided(fiber, V, mode))
        throw ModeBelowCutoff(mode.name() + " below cutoff at radius " +
                              std::to_string(radius * 1e9) + " nm");

    auto [ulo, uhi] = root_interval(mode);
    const double ak = radius * fiber.k();
    // keep n_eff at least eps away from both indices
    const double eps_n = 1e-9;
    const double u_min_n = std::sqrt(std::max(
        fiber.n_core * fiber.n_core - (fiber.n_core - eps_n) * (fiber.n_core - eps_n), 0.0)) * ak;
    const double u_max_n = std::sqrt(std::max(
        fiber.n_core * fiber.n_core - (fiber.n_clad + eps_n) * (fiber.n_clad + eps_n), 0.0)) * ak;
    double lo = std::max(ulo + 1e-9 * (uhi - ulo), u_min_n);
    double hi = std::min(uhi - 1e-9 * (uhi - ulo), u_max_n);
    if (!(lo < hi))
        throw ModeBelowCutoff(mode.name() + " has no admissible bracket at this radius");

    auto fn = scan_fn(fiber, radius, mode);
    double root_u = -1.0;
    for (int n_scan : {1024, 8192}) {
        double up = lo, fp = fn(lo);
        for (int i = 1; i <= n_scan; ++i) {
            const double uc = lo + (hi - lo) * i / n_scan;
            const double fc = fn(uc);
            if (std::isfinite(fp) && std::isfinite(fc) && fp * fc <= 0.0) {
                double a_ = up, b_ = uc, fa_ = fp;
                for (int it = 0; it < 220; ++it) {
                    const double mid = 0.5 * (a_ + b_);
                    const double fm = fn(mid);
                    if (fa_ * fm <= 0.0) {
                        b_ = mid;
                    } else {
                        a_ = mid;
                        fa_ = fm;
                    }
                    // |dn_eff| tolerance 1e-12 translated to u
                    const double du_tol = 1e-12 * ak * ak * neff_of_u(fiber, radius, mid) /
                                          std::max(mid, 1e-6);
                    if (b_ - a_ < std::max(du_tol, 2e-16 * mid)) break;
                }
                root_u = 0.5 * (a_ + b_);
                break;
            }
            up = uc;
            fp = fc;
        }
        if (root_u > 0.0) break;
    }
    if (root_u < 0.0)
        throw std::runtime_error("solve_mode: guided " + mode.name() +
                                 " but bracket scan found no root (radius " +
                                 std::to_string(radius * 1e9) + " nm)");

    ModeSolution sol;
    sol.mode = mode;
    sol.fiber_ = fiber;
    sol.radius = radius;
    sol.n_eff = neff_of_u(fiber, radius, root_u);
    sol.beta = sol.n_eff * fiber.k();
    sol.omega_ = kSpeedOfLight * fiber.k();
    const auto [u, w] = uw_of(fiber, radius, sol.n_eff);
    sol.u = u;
    sol.w = w;

    const int nu = mode.azimuthal;
    if (mode.family == ModeFamily::TE) {
        sol.A_ = 0.0;
        sol.B_ = 1.0;
    } else if (mode.family == ModeFamily::TM) {
        sol.A_ = 1.0;
        sol.B_ = 0.0;
    } else {
        const double s = nu * (1.0 / (u * u) + 1.0 / (w * w)) / (g_term(nu, u) + h_term(nu, w));
        sol.A_ = 1.0;
        sol.B_ = -(sol.beta / (sol.omega_ * kMu0)) * s;
    }
    const double jnu_u = bessel_j(nu, u);
    const double ksc_w = bessel_k_scaled(nu, w);
    sol.C_ = sol.A_ * jnu_u / ksc_w;  // scaled: multiply by e^{w-y} K_sc(y) outside
    sol.D_ = sol.B_ * jnu_u / ksc_w;
    sol.normalize_unit_power();
    return sol;
}

RadialAmplitudes ModeSolution::radial(double r) const {
    const int nu = mode.azimuthal;
    const double a = radius;
    const double e1 = kEps0 * fiber_.n_core * fiber_.n_core;
    const double e2 = kEps0 * fiber_.n_clad * fiber_.n_clad;
    RadialAmplitudes out{};
    if (r < a) {
        const double x = std::max(u * r / a, 1e-12);
        double jm, j0, jp;
        bessel_j_triplet(nu, x, jm, j0, jp);
        const double dJ = 0.5 * (jm - jp);
        const double nox = nu > 0 ? nu / x : 0.0;
        out.er = (a / u) * (beta * A_ * dJ + omega_ * kMu0 * B_ * nox * j0);
        out.ephi = -(a / u) * (beta * nox * A_ * j0 + omega_ * kMu0 * B_ * dJ);
        out.ez = A_ * j0;
        out.hr = (a / u) * (beta * B_ * dJ + omega_ * e1 * nox * A_ * j0);
        out.hphi = (a / u) * (beta * nox * B_ * j0 + omega_ * e1 * A_ * dJ);
        out.hz = B_ * j0;
    } else {
        const double y = w * r / a;
        double km, k0, kp;
        bessel_k_scaled_triplet(nu, y, km, k0, kp);
        const double scale = std::exp(w - y);
        const double K = k0 * scale;
        const double dK = -0.5 * (km + kp) * scale;
        const double noy = nu > 0 ? nu / y : 0.0;
        out.er = -(a / w) * (beta * C_ * dK + omega_ * kMu0 * D_ * noy * K);
        out.ephi = (a / w) * (beta * noy * C_ * K + omega_ * kMu0 * D_ * dK);
        out.ez = C_ * K;
        out.hr = -(a / w) * (beta * D_ * dK + omega_ * e2 * noy * C_ * K);
        out.hphi = -(a / w) * (beta * noy * D_ * K + omega_ * e2 * C_ * dK);
        out.hz = D_ * K;
    }
    return out;
}

double ModeSolution::axial_power() const {
    const double ang = mode.azimuthal == 0 ? 2.0 * M_PI : M_PI;
    auto sz = [this](double r) {
        const RadialAmplitudes f = radial(r);
        return (f.er * f.hphi - f.ephi * f.hr) * r;
    };
    const double a = radius;
    const double inner = integrate(sz, 0.0, a, 1e-10, 0.0, 36);
    // substitute t = w (r - a) / a so the evanescent tail is O(1) wide
    auto tail = [&](double t) { return sz(a * (1.0 + t / w)) * a / w; };
    const double outer = integrate(tail, 0.0, 45.0, 1e-10, 0.0, 36);
    return 0.5 * ang * (inner + outer);
}

void ModeSolution::normalize_unit_power() {
    const double p = axial_power();
    const double s = 1.0 / std::sqrt(std::fabs(p));
    A_ *= s;
    B_ *= s;
    C_ *= s;
    D_ *= s;
}

FieldPoint ModeSolution::field(double r, double phi) const {
    const RadialAmplitudes f = radial(r);
    const int nu = mode.azimuthal;
    double er, ephi, ez;
    if (!mode.hybrid()) {
        er = f.er;
        ephi = f.ephi;
        ez = f.ez;
    } else if (mode.parity == Parity::Even) {
        er = f.er * std::cos(nu * phi);
        ephi = f.ephi * std::sin(nu * phi);
        ez = f.ez * std::cos(nu * phi);
    } else {
        er = f.er * std::sin(nu * phi);
        ephi = -f.ephi * std::cos(nu * phi);
        ez = f.ez * std::sin(nu * phi);
    }
    FieldPoint p;
    p.er = er;
    p.ephi = ephi;
    p.ez = std::complex<double>(0.0, ez);  // longitudinal component leads by 90 deg
    p.ex = er * std::cos(phi) - ephi * std::sin(phi);
    p.ey = er * std::sin(phi) + ephi * std::cos(phi);
    return p;
}

double ModeSolution::surface_avg_intensity() const {
    const RadialAmplitudes f = radial(radius * (1.0 - 1e-12));
    const double s = f.er * f.er + f.ephi * f.ephi + f.ez * f.ez;
    return mode.azimuthal == 0 ? s : 0.5 * s;
}

std::vector<ModeId> list_guided_modes(const FiberSpec& fiber, double radius) {
    fiber.validate();
    if (!(radius > 0.0)) throw std::invalid_argument("list_guided_modes: radius must be > 0");
    const double V = v_number(fiber, radius);
    std::vector<ModeId> scalar_modes;
    for (int m = 1; bessel_j_zero(0, m) < V; ++m) {
        scalar_modes.push_back(mode_te(m));
        scalar_modes.push_back(mode_tm(m));
    }
    for (int nu = 1; nu < 64; ++nu) {
        bool any = false;
        for (int m = 1;; ++m) {
            try {
                if (cutoff_v(fiber, mode_he(nu, m)) >= V) break;
            } catch (const ModeBelowCutoff&) {
                // HE11: no cutoff, always guided
            }
            scalar_modes.push_back(mode_he(nu, m));
            any = true;
        }
        for (int m = 1; bessel_j_zero(nu, m) < V; ++m) {
            scalar_modes.push_back(mode_eh(nu, m));
            any = true;
        }
        if (!any) break;
    }
    std::vector<std::pair<double, ModeId>> solved;
    for (const ModeId& id : scalar_modes)
        solved.emplace_back(solve_mode(fiber, radius, id).n_eff, id);
    std::stable_sort(solved.begin(), solved.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<ModeId> out;
    for (const auto& [neff, id] : solved) {
        (void)neff;
        if (id.hybrid()) {
            out.push_back({id.family, id.azimuthal, id.radial, Parity::Even});
            out.push_back({id.family, id.azimuthal, id.radial, Parity::Odd});
        } else {
            out.push_back(id);
        }
    }
    return out;
}

double core_escape_radius(const FiberSpec& fiber) {
    fiber.validate();
    const double na = std::sqrt(fiber.n_core * fiber.n_core - fiber.n_clad * fiber.n_clad);
    const double core_cut = bessel_j_zero(0, 1) * fiber.wavelength / (2.0 * M_PI * na);
    return core_cut / fiber.core_clad_ratio;
}

} // namespace onf
