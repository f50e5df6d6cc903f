#include "onf/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "onf/numerics.hpp"

namespace onf {

namespace {

struct Harmonic {
    int m;
    bool is_cos;
};

// Azimuthal harmonic content of the x-analyzer field component. The radial
// envelope index selects: 0 -> (Rr - Rphi)/2, 1 -> (Rr + Rphi)/2, 2 -> Rr,
// 3 -> -Rphi, 4 -> Rz.
struct HarmonicTerm {
    Harmonic h;
    int envelope;
};

std::vector<HarmonicTerm> x_harmonics(const ModeId& id) {
    if (id.family == ModeFamily::TM) return {{{1, true}, 2}};
    if (id.family == ModeFamily::TE) return {{{1, false}, 3}};
    const int nu = id.azimuthal;
    const bool even = id.parity == Parity::Even;
    std::vector<HarmonicTerm> out;
    if (!(nu - 1 == 0 && !even))  // sin(0 phi) vanishes
        out.push_back({{nu - 1, even}, 0});
    out.push_back({{nu + 1, even}, 1});
    return out;
}

std::vector<HarmonicTerm> z_harmonics(const ModeId& id) {
    if (id.family == ModeFamily::TE) return {};
    if (id.family == ModeFamily::TM) return {{{0, true}, 4}};
    return {{{id.azimuthal, id.parity == Parity::Even}, 4}};
}

double envelope_value(const RadialAmplitudes& f, int which) {
    switch (which) {
        case 0: return 0.5 * (f.er - f.ephi);
        case 1: return 0.5 * (f.er + f.ephi);
        case 2: return f.er;
        case 3: return -f.ephi;
        case 4: return f.ez;
    }
    return 0.0;
}

double angular_factor(const Harmonic& h) {
    return h.m == 0 ? 2.0 * M_PI : M_PI;
}

bool harmonics_couple(const std::vector<HarmonicTerm>& a, const std::vector<HarmonicTerm>& b) {
    for (const auto& ta : a)
        for (const auto& tb : b)
            if (ta.h.m == tb.h.m && ta.h.is_cos == tb.h.is_cos) return true;
    return false;
}

constexpr int kRadialQuadOrder = 64;

} // namespace

double ModalState::total_power() const {
    double p = 0.0;
    for (const auto& c : amps) p += std::norm(c);
    return p;
}

void ModalState::validate_unit_norm(double tol) const {
    if (basis.size() != amps.size())
        throw std::invalid_argument("ModalState: basis/amplitude size mismatch");
    if (std::fabs(total_power() - 1.0) > tol)
        throw std::invalid_argument("ModalState: launch power must be 1");
}

ModalState make_state(std::vector<ModeId> basis, std::vector<std::complex<double>> amps,
                      bool renormalize) {
    ModalState s{std::move(basis), std::move(amps)};
    if (s.basis.size() != s.amps.size())
        throw std::invalid_argument("make_state: basis/amplitude size mismatch");
    for (auto& id : s.basis) id.validate();
    if (renormalize) {
        const double p = std::sqrt(s.total_power());
        if (p <= 0.0) throw std::invalid_argument("make_state: zero state");
        for (auto& c : s.amps) c /= p;
    }
    s.validate_unit_norm();
    return s;
}

struct PropagationModel::Impl {
    FiberSpec fiber;
    std::vector<ModeId> basis;
    double a_lo = 0.0, a_hi = 0.0;
    int grid_n = 2000;

    std::vector<double> cutoffs;          // per basis mode; 0 = no cutoff
    std::vector<CubicSpline> beta_spl;    // per basis mode, on ln(a)
    std::vector<double> spl_lo;           // spline domain lower edge per mode
    // pair tables: index p = pair_index(i, j); empty spline when uncoupled
    std::vector<std::array<CubicSpline, 2>> bulk_spl, surf_spl;
    std::vector<std::array<bool, 2>> pair_coupled;

    std::size_t pair_index(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        return i * basis.size() + j;
    }
};

PropagationModel::~PropagationModel() = default;
PropagationModel::PropagationModel(PropagationModel&&) noexcept = default;

const FiberSpec& PropagationModel::fiber() const { return impl_->fiber; }
const std::vector<ModeId>& PropagationModel::basis() const { return impl_->basis; }
std::size_t PropagationModel::n_modes() const { return impl_->basis.size(); }
double PropagationModel::a_lo() const { return impl_->a_lo; }
double PropagationModel::a_hi() const { return impl_->a_hi; }

PropagationModel::PropagationModel(const FiberSpec& fiber, std::vector<ModeId> basis,
                                   double a_lo, double a_hi, int grid_n, int n_threads)
    : impl_(std::make_unique<Impl>()) {
    fiber.validate();
    if (!(a_lo > 0.0 && a_hi > a_lo))
        throw std::invalid_argument("PropagationModel: need 0 < a_lo < a_hi");
    if (grid_n < 16) throw std::invalid_argument("PropagationModel: grid too small");
    impl_->fiber = fiber;
    impl_->basis = std::move(basis);
    impl_->a_lo = a_lo;
    impl_->a_hi = a_hi;
    impl_->grid_n = grid_n;
    const std::size_t nm = impl_->basis.size();
    if (nm == 0) throw std::invalid_argument("PropagationModel: empty basis");
    for (auto& id : impl_->basis) id.validate();

    impl_->cutoffs.resize(nm, 0.0);
    for (std::size_t i = 0; i < nm; ++i) {
        try {
            impl_->cutoffs[i] = cutoff_radius(fiber, impl_->basis[i]);
        } catch (const ModeBelowCutoff&) {
            impl_->cutoffs[i] = 0.0;  // fundamental: guided everywhere
        }
    }

    // shared log-spaced radius grid
    std::vector<double> ts(grid_n);
    const double t0 = std::log(a_lo), t1 = std::log(a_hi);
    for (int k = 0; k < grid_n; ++k)
        ts[k] = t0 + (t1 - t0) * k / (grid_n - 1);

    // per grid point, per mode: beta and harmonic envelope samples
    struct PointData {
        std::vector<char> guided;
        std::vector<double> beta;
        // per mode: envelope values on radial quad nodes (5 envelopes) + at surface
        std::vector<std::array<std::vector<double>, 5>> env;
        std::vector<std::array<double, 5>> env_surf;
    };
    std::vector<PointData> pts(grid_n);
    const GaussRule& gr = gauss_legendre(kRadialQuadOrder);

    parallel_for(grid_n, n_threads, [&](std::size_t k) {
        const double a = std::exp(ts[k]);
        PointData& pd = pts[k];
        pd.guided.assign(nm, 0);
        pd.beta.assign(nm, 0.0);
        pd.env.resize(nm);
        pd.env_surf.resize(nm);
        std::map<int, ModeSolution> solved;
        for (std::size_t i = 0; i < nm; ++i) {
            const ModeId& id = impl_->basis[i];
            if (impl_->cutoffs[i] > 0.0 && a <= impl_->cutoffs[i] * (1.0 + 1e-12)) continue;
            auto it = solved.find(id.scalar_key());
            if (it == solved.end()) {
                ModeId even = id;
                if (id.hybrid()) even.parity = Parity::Even;
                it = solved.emplace(id.scalar_key(), solve_mode(impl_->fiber, a, even)).first;
            }
            const ModeSolution& sol = it->second;
            pd.guided[i] = 1;
            pd.beta[i] = sol.beta;
            for (auto& v : pd.env[i]) v.assign(kRadialQuadOrder, 0.0);
            for (int q = 0; q < kRadialQuadOrder; ++q) {
                const double r = 0.5 * a * (1.0 + gr.x[q]);
                const RadialAmplitudes f = sol.radial(r);
                for (int e = 0; e < 5; ++e) pd.env[i][e][q] = envelope_value(f, e);
            }
            const RadialAmplitudes fs = sol.radial(a * (1.0 - 1e-12));
            for (int e = 0; e < 5; ++e) pd.env_surf[i][e] = envelope_value(fs, e);
        }
    });

    // assemble per-mode beta splines over the guided subrange
    impl_->beta_spl.resize(nm);
    impl_->spl_lo.assign(nm, a_hi);
    for (std::size_t i = 0; i < nm; ++i) {
        std::vector<double> tx, ty;
        for (int k = 0; k < grid_n; ++k)
            if (pts[k].guided[i]) {
                tx.push_back(ts[k]);
                ty.push_back(pts[k].beta[i]);
            }
        if (tx.size() >= 3) {
            impl_->beta_spl[i] = CubicSpline(tx, ty);
            impl_->spl_lo[i] = std::exp(tx.front());
        }
    }

    // pair weight splines
    const std::size_t np = nm * nm;
    impl_->bulk_spl.resize(np);
    impl_->surf_spl.resize(np);
    impl_->pair_coupled.assign(np, {false, false});
    for (std::size_t i = 0; i < nm; ++i) {
        for (std::size_t j = i; j < nm; ++j) {
            const std::size_t p = impl_->pair_index(i, j);
            for (int ch = 0; ch < 2; ++ch) {
                const auto hi_ = ch == 0 ? x_harmonics(impl_->basis[i]) : z_harmonics(impl_->basis[i]);
                const auto hj_ = ch == 0 ? x_harmonics(impl_->basis[j]) : z_harmonics(impl_->basis[j]);
                if (!harmonics_couple(hi_, hj_)) continue;
                impl_->pair_coupled[p][ch] = true;
                std::vector<double> tx, tb, tsf;
                for (int k = 0; k < grid_n; ++k) {
                    if (!pts[k].guided[i] || !pts[k].guided[j]) continue;
                    const double a = std::exp(ts[k]);
                    double wb = 0.0, wsurf = 0.0;
                    for (const auto& ta : hi_) {
                        for (const auto& tb_ : hj_) {
                            if (ta.h.m != tb_.h.m || ta.h.is_cos != tb_.h.is_cos) continue;
                            const double ang = angular_factor(ta.h);
                            double riem = 0.0;
                            const auto& ea = pts[k].env[i][ta.envelope];
                            const auto& eb = pts[k].env[j][tb_.envelope];
                            for (int q = 0; q < kRadialQuadOrder; ++q) {
                                const double r = 0.5 * a * (1.0 + gr.x[q]);
                                riem += gr.w[q] * ea[q] * eb[q] * r;
                            }
                            wb += ang * riem * 0.5 * a;
                            wsurf += ang * pts[k].env_surf[i][ta.envelope] *
                                     pts[k].env_surf[j][tb_.envelope] * a;
                        }
                    }
                    tx.push_back(ts[k]);
                    tb.push_back(wb);
                    tsf.push_back(wsurf);
                }
                if (tx.size() >= 3) {
                    impl_->bulk_spl[p][ch] = CubicSpline(tx, tb);
                    impl_->surf_spl[p][ch] = CubicSpline(std::move(tx), std::move(tsf));
                } else {
                    impl_->pair_coupled[p][ch] = false;
                }
            }
        }
    }
}

namespace {
double clamp_log(double a, const CubicSpline& s) {
    double t = std::log(a);
    if (t < s.x_front()) t = s.x_front();
    if (t > s.x_back()) t = s.x_back();
    return t;
}
} // namespace

double PropagationModel::beta(std::size_t i, double a) const {
    const CubicSpline& s = impl_->beta_spl.at(i);
    if (s.empty())
        throw ModeBelowCutoff(impl_->basis[i].name() + " has no guided range in this model");
    return s(clamp_log(a, s));
}

double PropagationModel::cutoff(std::size_t i) const { return impl_->cutoffs.at(i); }

bool PropagationModel::guided_at(std::size_t i, double a) const {
    return impl_->cutoffs.at(i) == 0.0 || a > impl_->cutoffs[i];
}

bool PropagationModel::coupled(int channel, std::size_t i, std::size_t j) const {
    return impl_->pair_coupled.at(impl_->pair_index(i, j))[channel];
}

double PropagationModel::bulk_weight(int channel, std::size_t i, std::size_t j, double a) const {
    const std::size_t p = impl_->pair_index(i, j);
    if (!impl_->pair_coupled.at(p)[channel]) return 0.0;
    const CubicSpline& s = impl_->bulk_spl[p][channel];
    return s(clamp_log(a, s));
}

double PropagationModel::surface_weight(int channel, std::size_t i, std::size_t j,
                                        double a) const {
    const std::size_t p = impl_->pair_index(i, j);
    if (!impl_->pair_coupled.at(p)[channel]) return 0.0;
    const CubicSpline& s = impl_->surf_spl[p][channel];
    return s(clamp_log(a, s));
}

double PropagationModel::beta_interp_error(std::size_t i, int probes) const {
    const CubicSpline& s = impl_->beta_spl.at(i);
    if (s.empty()) return 0.0;
    double worst = 0.0;
    for (int k = 0; k < probes; ++k) {
        const double t = s.x_front() + (s.x_back() - s.x_front()) * (k + 0.37) / probes;
        const double a = std::exp(t);
        const double direct = solve_mode(impl_->fiber, a, impl_->basis[i]).beta;
        worst = std::max(worst, std::fabs(s(t) - direct) / direct);
    }
    return worst;
}

namespace {

std::size_t find_mode(const PropagationModel& model, const ModeId& id) {
    const auto& basis = model.basis();
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (basis[i] == id) return i;
    throw std::invalid_argument("mode " + id.name() + " not in model basis");
}

// Ejection coordinate of basis mode i on the input half, if its cutoff lies
// inside the profile; infinity otherwise.
double ejection_z(const PropagationModel& model, const TaperProfile& profile, std::size_t i) {
    const double ac = model.cutoff(i);
    // radius exactly at cutoff counts as below cutoff
    if (ac <= 0.0 || ac < profile.waist_radius()) return std::numeric_limits<double>::infinity();
    if (ac >= profile.max_radius()) return 0.0;  // never guided anywhere in the device
    return profile.find_z_for_radius(ac, ProfileSide::Input);
}

double phase_integral(const PropagationModel& model, const TaperProfile& profile,
                      std::size_t idx, double z0, double z1, double rel_tol) {
    // integrate beta(a(z)) segment by segment (integrand smooth within each)
    double total = 0.0;
    auto f = [&](double z) { return model.beta(idx, profile.radius_at(z)); };
    double cur = z0;
    for (const auto& seg : profile.segments()) {
        if (seg.z1 <= z0 || seg.z0 >= z1) continue;
        const double lo = std::max(cur, seg.z0);
        const double hi = std::min(z1, seg.z1);
        if (hi > lo) total += integrate(f, lo, hi, rel_tol, 0.0, 38);
        cur = hi;
    }
    return total;
}

} // namespace

double accumulated_phase(const PropagationModel& model, const TaperProfile& profile,
                         const ModeId& mode, double z, double rel_tol) {
    if (z < 0.0 || z > profile.total_length() * (1.0 + 1e-12))
        throw std::domain_error("accumulated_phase: z outside profile");
    const std::size_t idx = find_mode(model, mode);
    const double zej = ejection_z(model, profile, idx);
    if (z >= zej)
        throw CutoffCrossed(mode.name() + " crosses cutoff before requested z", zej);
    return phase_integral(model, profile, idx, 0.0, z, rel_tol);
}

ModalState propagate(const PropagationModel& model, const TaperProfile& profile,
                     const ModalState& launch, double z, std::vector<LossEvent>* losses) {
    if (z < 0.0 || z > profile.total_length() * (1.0 + 1e-12))
        throw std::domain_error("propagate: z outside profile");
    launch.validate_unit_norm();
    ModalState out = launch;
    for (std::size_t m = 0; m < launch.basis.size(); ++m) {
        const std::size_t idx = find_mode(model, launch.basis[m]);
        const double zej = ejection_z(model, profile, idx);
        if (z >= zej) {
            if (losses && std::norm(launch.amps[m]) > 0.0)
                losses->push_back({launch.basis[m], zej, std::norm(launch.amps[m])});
            out.amps[m] = 0.0;
            continue;
        }
        const double phi = phase_integral(model, profile, idx, 0.0, z, 1e-9);
        out.amps[m] = launch.amps[m] * std::polar(1.0, std::fmod(phi, 2.0 * M_PI));
    }
    return out;
}

FieldMap local_fields(const PropagationModel& model, const TaperProfile& profile,
                      const ModalState& launch, double z, double half_extent,
                      std::size_t n_per_axis) {
    const ModalState st = propagate(model, profile, launch, z);
    const double a = profile.radius_at(z);
    std::vector<ModeSolution> sols;
    sols.reserve(st.basis.size());
    for (const auto& id : st.basis)
        sols.push_back(solve_mode(model.fiber(), a, id));
    FieldMap fm;
    fm.nx = fm.ny = n_per_axis;
    fm.xs.resize(n_per_axis);
    fm.ys.resize(n_per_axis);
    for (std::size_t i = 0; i < n_per_axis; ++i)
        fm.xs[i] = fm.ys[i] = -half_extent + 2.0 * half_extent * i / (n_per_axis - 1);
    fm.ex.assign(n_per_axis * n_per_axis, 0.0);
    fm.ey.assign(n_per_axis * n_per_axis, 0.0);
    fm.ez.assign(n_per_axis * n_per_axis, 0.0);
    for (std::size_t iy = 0; iy < n_per_axis; ++iy) {
        for (std::size_t ix = 0; ix < n_per_axis; ++ix) {
            const double x = fm.xs[ix], y = fm.ys[iy];
            const double r = std::hypot(x, y);
            const double phi = std::atan2(y, x);
            std::complex<double> ex = 0.0, ey = 0.0, ez = 0.0;
            for (std::size_t mI = 0; mI < sols.size(); ++mI) {
                if (st.amps[mI] == std::complex<double>(0.0)) continue;
                const FieldPoint f = sols[mI].field(r, phi);
                ex += st.amps[mI] * f.ex;
                ey += st.amps[mI] * f.ey;
                ez += st.amps[mI] * f.ez;
            }
            const std::size_t o = iy * n_per_axis + ix;
            fm.ex[o] = ex;
            fm.ey[o] = ey;
            fm.ez[o] = ez;
        }
    }
    return fm;
}

RsTrace synthesize_rs_trace(const PropagationModel& model, const TaperProfile& profile,
                            const ModalState& launch, const SynthParams& params) {
    launch.validate_unit_norm();
    if (!(params.dz > 0.0)) throw std::invalid_argument("synthesize_rs_trace: dz must be > 0");
    const double z0 = params.z_start.value_or(0.0);
    const double z1 = params.z_end.value_or(profile.total_length());
    if (!(z1 > z0) || z0 < 0.0 || z1 > profile.total_length() * (1.0 + 1e-12))
        throw std::domain_error("synthesize_rs_trace: bad z span");
    const double surf_coeff =
        params.surface_coeff ? *params.surface_coeff : surface_coeff_default(model.fiber());

    const std::size_t nm = launch.basis.size();
    std::vector<std::size_t> idx(nm);
    std::vector<double> zej(nm), phase(nm);
    for (std::size_t m = 0; m < nm; ++m) {
        idx[m] = find_mode(model, launch.basis[m]);
        zej[m] = ejection_z(model, profile, idx[m]);
        phase[m] = phase_integral(model, profile, idx[m], 0.0, std::min(z0, zej[m]), 1e-9);
    }

    const std::size_t n = static_cast<std::size_t>(std::floor((z1 - z0) / params.dz)) + 1;
    RsTrace tr;
    tr.z0 = z0;
    tr.dz = params.dz;
    tr.p_long.assign(n, 0.0);
    tr.p_trans.assign(n, 0.0);
    tr.p_total.assign(n, 0.0);

    // two-point Gauss per dz step keeps the incremental phase integral well
    // below the adaptive-quadrature tolerance
    const double gl = 0.5 - 0.5 / std::sqrt(3.0), gu = 0.5 + 0.5 / std::sqrt(3.0);
    double zprev = z0;
    for (std::size_t k = 0; k < n; ++k) {
        const double z = z0 + params.dz * static_cast<double>(k);
        if (k > 0) {
            const double h = z - zprev;
            for (std::size_t m = 0; m < nm; ++m) {
                if (z >= zej[m]) continue;
                const double b1 = model.beta(idx[m], profile.radius_at(zprev + gl * h));
                const double b2 = model.beta(idx[m], profile.radius_at(zprev + gu * h));
                phase[m] += 0.5 * h * (b1 + b2);
            }
        }
        zprev = z;
        const double a = profile.radius_at(std::min(z, profile.total_length()));
        double pch[2] = {0.0, 0.0};
        for (int ch = 0; ch < 2; ++ch) {
            for (std::size_t i = 0; i < nm; ++i) {
                if (z >= zej[i]) continue;
                const double ci = std::abs(launch.amps[i]);
                if (ci == 0.0) continue;
                pch[ch] += ci * ci * (params.bulk_coeff * model.bulk_weight(ch, idx[i], idx[i], a) +
                                      surf_coeff * model.surface_weight(ch, idx[i], idx[i], a));
                for (std::size_t j = i + 1; j < nm; ++j) {
                    if (z >= zej[j]) continue;
                    if (!model.coupled(ch, idx[i], idx[j])) continue;
                    const std::complex<double> cc =
                        launch.amps[i] * std::conj(launch.amps[j]) *
                        std::polar(1.0, phase[i] - phase[j]);
                    const double wij =
                        params.bulk_coeff * model.bulk_weight(ch, idx[i], idx[j], a) +
                        surf_coeff * model.surface_weight(ch, idx[i], idx[j], a);
                    pch[ch] += 2.0 * cc.real() * wij;
                }
            }
        }
        tr.p_trans[k] = pch[0];
        tr.p_long[k] = pch[1];
        tr.p_total[k] = pch[0] + pch[1];
    }

    // Gaussian point-spread blur along z
    if (params.psf_fwhm > 0.0) {
        const double sigma = params.psf_fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
        const int half = static_cast<int>(std::ceil(4.0 * sigma / params.dz));
        if (half >= 1) {
            std::vector<double> kernel(2 * half + 1);
            for (int t = -half; t <= half; ++t)
                kernel[t + half] = std::exp(-0.5 * (t * params.dz) * (t * params.dz) / (sigma * sigma));
            for (auto* chan : {&tr.p_long, &tr.p_trans, &tr.p_total}) {
                std::vector<double> out(n, 0.0);
                for (std::size_t k = 0; k < n; ++k) {
                    double acc = 0.0, wsum = 0.0;
                    for (int t = -half; t <= half; ++t) {
                        const long kk = static_cast<long>(k) + t;
                        if (kk < 0 || kk >= static_cast<long>(n)) continue;
                        acc += kernel[t + half] * (*chan)[kk];
                        wsum += kernel[t + half];
                    }
                    out[k] = acc / wsum;
                }
                *chan = std::move(out);
            }
        }
    }

    // reference level for the additive noise floor: waist mean of total power
    double floor_ref = 0.0;
    {
        double acc = 0.0;
        std::size_t cnt = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double z = tr.z_at(k);
            if (z >= profile.waist_start() && z <= profile.waist_end()) {
                acc += tr.p_total[k];
                ++cnt;
            }
        }
        if (cnt == 0) {
            for (double v : tr.p_total) acc += v;
            cnt = n;
        }
        floor_ref = acc / static_cast<double>(cnt);
    }

    if (params.noise) {
        const NoiseModel& nz = *params.noise;
        const double floor_sigma = nz.floor_frac * floor_ref;
        for (int ch = 0; ch < 3; ++ch) {
            auto& chan = ch == 0 ? tr.p_long : ch == 1 ? tr.p_trans : tr.p_total;
            for (std::size_t k = 0; k < n; ++k) {
                const auto [g1, g2] = counter_gaussians(nz.seed, k * 4 + ch);
                chan[k] = chan[k] * (1.0 + nz.mult_sigma * g1) + floor_sigma * g2;
                if (chan[k] < 0.0) chan[k] = 0.0;
            }
        }
    }

    nlohmann::json launch_j = nlohmann::json::array();
    for (std::size_t m = 0; m < nm; ++m)
        launch_j.push_back({{"mode", launch.basis[m].name()},
                            {"re", launch.amps[m].real()},
                            {"im", launch.amps[m].imag()}});
    nlohmann::json profile_j;
    try {
        profile_j = profile.descriptor();
    } catch (const std::exception&) {
        profile_j = nullptr;  // table-based profile
    }
    tr.metadata = {
        {"profile", profile_j},
        {"wavelength_nm", model.fiber().wavelength * 1e9},
        {"n_core", model.fiber().n_core},
        {"n_clad", model.fiber().n_clad},
        {"dz_um", params.dz * 1e6},
        {"z_start_mm", z0 * 1e3},
        {"z_end_mm", z1 * 1e3},
        {"bulk_coeff", params.bulk_coeff},
        {"surface_coeff", surf_coeff},
        {"psf_fwhm_um", params.psf_fwhm * 1e6},
        {"launch", launch_j},
        {"waist_start_mm", profile.waist_start() * 1e3},
        {"waist_end_mm", profile.waist_end() * 1e3},
        {"aw_nm", profile.waist_radius() * 1e9},
        {"analyzer", params.channel.analyzer == Analyzer::Longitudinal ? "longitudinal"
                     : params.channel.analyzer == Analyzer::Transverse ? "transverse"
                                                                       : "total"},
    };
    if (params.noise) {
        tr.metadata["noise"] = {{"mult_sigma", params.noise->mult_sigma},
                                {"floor_frac", params.noise->floor_frac},
                                {"seed", params.noise->seed}};
    }
    return tr;
}

double surface_coeff_default(const FiberSpec& fiber, double a_ref) {
    const ModeSolution tm = solve_mode(fiber, a_ref, mode_tm(1));
    const ModeSolution he = solve_mode(fiber, a_ref, mode_he(2, 1, Parity::Even));
    const GaussRule& gr = gauss_legendre(kRadialQuadOrder);
    double bulk = 0.0, surf = 0.0;
    for (const ModeSolution* sol : {&tm, &he}) {
        const auto hx = x_harmonics(sol->mode);
        const auto hz = z_harmonics(sol->mode);
        for (const auto* terms : {&hx, &hz}) {
            for (const auto& t : *terms) {
                const double ang = angular_factor(t.h);
                double riem = 0.0;
                for (int q = 0; q < kRadialQuadOrder; ++q) {
                    const double r = 0.5 * a_ref * (1.0 + gr.x[q]);
                    const double v = envelope_value(sol->radial(r), t.envelope);
                    riem += gr.w[q] * v * v * r;
                }
                bulk += 0.5 * ang * riem * 0.5 * a_ref;
                const double vs = envelope_value(sol->radial(a_ref * (1.0 - 1e-12)), t.envelope);
                surf += 0.5 * ang * vs * vs * a_ref;
            }
        }
    }
    return 10.0 * bulk / surf;
}

} // namespace onf
