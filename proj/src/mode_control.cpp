#include "onf/mode_control.hpp"

#include <cmath>

#include "onf/fft.hpp"

namespace onf {

double LaunchState::lp11_power() const {
    double p = 0.0;
    for (const auto& c : lp11) p += std::norm(c);
    return p;
}

void LaunchState::validate_unit_norm(double tol) const {
    if (std::fabs(lp11_power() - 1.0) > tol)
        throw std::invalid_argument("LaunchState: LP11 amplitudes must have unit norm");
}

HwpMatrix hwp_matrix(double alpha) {
    const double c = std::cos(2.0 * alpha);
    const double s = std::sin(2.0 * alpha);
    // columns act on (TM01, TE01, HE21e, HE21o)
    return {{{0.0, 0.0, c, s},
             {0.0, 0.0, s, -c},
             {c, s, 0.0, 0.0},
             {s, -c, 0.0, 0.0}}};
}

LaunchState apply_hwp(const LaunchState& state, double alpha) {
    const HwpMatrix M = hwp_matrix(alpha);
    LaunchState out = state;
    for (int i = 0; i < 4; ++i) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < 4; ++j) acc += M[i][j] * state.lp11[j];
        out.lp11[i] = acc;
    }
    // fundamental passenger: plain Jones reflection about the fast axis
    const double c = std::cos(2.0 * alpha), s = std::sin(2.0 * alpha);
    out.he11_x = c * state.he11_x + s * state.he11_y;
    out.he11_y = s * state.he11_x - c * state.he11_y;
    return out;
}

std::pair<double, double> pair_powers(const LaunchState& state) {
    const double p_tm = 2.0 * std::abs(state.lp11[0]) * std::abs(state.lp11[2]);
    const double p_te = 2.0 * std::abs(state.lp11[1]) * std::abs(state.lp11[3]);
    return {p_tm, p_te};
}

std::vector<ModeId> launch_basis(bool with_fundamental) {
    std::vector<ModeId> b = {mode_tm(1), mode_te(1), mode_he(2, 1, Parity::Even),
                             mode_he(2, 1, Parity::Odd)};
    if (with_fundamental) {
        b.push_back(mode_he(1, 1, Parity::Even));
        b.push_back(mode_he(1, 1, Parity::Odd));
    }
    return b;
}

ModalState to_modal_state(const LaunchState& state) {
    const bool fund = std::norm(state.he11_x) + std::norm(state.he11_y) > 0.0;
    std::vector<std::complex<double>> amps(state.lp11.begin(), state.lp11.end());
    if (fund) {
        amps.push_back(state.he11_x);
        amps.push_back(state.he11_y);
    }
    return make_state(launch_basis(fund), std::move(amps), true);
}

HwpScan hwp_scan(const PropagationModel& model, const TaperProfile& profile,
                 const LaunchState& base_state, const std::vector<double>& alphas,
                 Analyzer channel, const SynthParams& params) {
    if (alphas.empty()) throw std::invalid_argument("hwp_scan: empty alpha grid");
    base_state.validate_unit_norm();

    HwpScan scan;
    scan.alphas = alphas;
    const double aw = profile.waist_radius();
    scan.f_tm = pair_beat_frequency(model.fiber(), {mode_he(2, 1, Parity::Even), mode_tm(1)}, aw);
    scan.f_te = pair_beat_frequency(model.fiber(), {mode_he(2, 1, Parity::Odd), mode_te(1)}, aw);

    for (double alpha : alphas) {
        const LaunchState rotated = apply_hwp(base_state, alpha);
        const RsTrace tr = synthesize_rs_trace(model, profile, to_modal_state(rotated), params);
        // whole-waist untapered magnitude spectrum
        const double z_lo = std::max(profile.waist_start(), tr.z0);
        const double z_hi = std::min(profile.waist_end(), tr.z0 + tr.dz * (tr.size() - 1));
        const auto& p = channel == Analyzer::Longitudinal ? tr.p_long
                        : channel == Analyzer::Transverse ? tr.p_trans
                                                          : tr.p_total;
        const std::size_t i0 = static_cast<std::size_t>(std::ceil((z_lo - tr.z0) / tr.dz));
        const std::size_t i1 = static_cast<std::size_t>(std::floor((z_hi - tr.z0) / tr.dz));
        std::vector<double> x(p.begin() + i0, p.begin() + i1 + 1);
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(x.size());
        for (double& v : x) v -= mean;
        MagnitudeSpectrum ms = magnitude_spectrum(x, tr.dz, 4);
        if (scan.freqs.empty()) {
            scan.freqs.resize(ms.mag.size());
            for (std::size_t i = 0; i < ms.mag.size(); ++i) scan.freqs[i] = i * ms.df;
        }
        auto band_at = [&](double f) {
            const std::size_t i = static_cast<std::size_t>(std::llround(f / ms.df));
            double best = 0.0;
            for (std::size_t k = i > 2 ? i - 2 : 0; k <= i + 2 && k < ms.mag.size(); ++k)
                best = std::max(best, ms.mag[k]);
            return best;
        };
        scan.band_tm.push_back(band_at(scan.f_tm));
        scan.band_te.push_back(band_at(scan.f_te));
        scan.columns.push_back(std::move(ms.mag));
    }
    return scan;
}

} // namespace onf
