#include "onf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>

#include "onf/fft.hpp"
#include "onf/numerics.hpp"

namespace onf {

namespace {

const std::vector<double>& channel_of(const RsTrace& tr, Analyzer a) {
    switch (a) {
        case Analyzer::Longitudinal: return tr.p_long;
        case Analyzer::Transverse: return tr.p_trans;
        case Analyzer::Total: return tr.p_total;
    }
    throw std::logic_error("bad analyzer");
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    return v[mid];
}

// parabolic refinement around bin i of a sampled spectrum
double parabolic_center(const std::vector<double>& s, std::size_t i, double df) {
    if (i == 0 || i + 1 >= s.size()) return i * df;
    const double y1 = s[i - 1], y2 = s[i], y3 = s[i + 1];
    const double den = y1 - 2.0 * y2 + y3;
    const double d = den == 0.0 ? 0.0 : 0.5 * (y1 - y3) / den;
    return (static_cast<double>(i) + d) * df;
}

double halfmax_fwhm(const std::vector<double>& s, std::size_t i, double df) {
    const double half = 0.5 * s[i];
    std::size_t il = i;
    while (il > 0 && s[il] > half) --il;
    std::size_t ir = i;
    while (ir + 1 < s.size() && s[ir] > half) ++ir;
    double fl = il * df, fr = ir * df;
    if (s[il + 1] != s[il]) fl = (il + (half - s[il]) / (s[il + 1] - s[il])) * df;
    if (s[ir] != s[ir - 1]) fr = (ir - 1 + (half - s[ir - 1]) / (s[ir] - s[ir - 1])) * df;
    return fr - fl;
}

std::vector<double> slice_channel(const RsTrace& tr, Analyzer channel, double z_lo,
                                  double z_hi, double* extent = nullptr) {
    if (!(z_hi > z_lo)) throw std::invalid_argument("bad z window");
    const auto& p = channel_of(tr, channel);
    const std::size_t i0 = static_cast<std::size_t>(std::ceil((z_lo - tr.z0) / tr.dz - 1e-9));
    const std::size_t i1 = static_cast<std::size_t>(std::floor((z_hi - tr.z0) / tr.dz + 1e-9));
    if (i1 >= p.size() || i1 <= i0)
        throw std::invalid_argument("z window outside trace");
    if (extent) *extent = (i1 - i0) * tr.dz;
    return {p.begin() + i0, p.begin() + i1 + 1};
}

} // namespace

double pair_beat_frequency(const FiberSpec& fiber, const ModePair& pair, double radius) {
    const double n1 = solve_mode(fiber, radius, pair.first).n_eff;
    const double n2 = solve_mode(fiber, radius, pair.second).n_eff;
    return std::fabs(n1 - n2) / fiber.wavelength;
}

BeatModel::BeatModel(const FiberSpec& fiber, const ModePair& pair, double a_lo, double a_hi,
                     int grid_n)
    : pair_(pair), a_lo_(a_lo), a_hi_(a_hi) {
    if (!(a_hi > a_lo && a_lo > 0.0)) throw std::invalid_argument("BeatModel: bad radius range");
    std::vector<double> ts, ys;
    ts.reserve(grid_n);
    for (int k = 0; k < grid_n; ++k) {
        const double t = std::log(a_lo) + (std::log(a_hi) - std::log(a_lo)) * k / (grid_n - 1);
        const double a = std::exp(t);
        try {
            const double d = (solve_mode(fiber, a, pair.first).n_eff -
                              solve_mode(fiber, a, pair.second).n_eff) /
                             fiber.wavelength;
            ts.push_back(t);
            ys.push_back(d);
        } catch (const ModeBelowCutoff&) {
        }
    }
    if (ts.size() < 8)
        throw ModeBelowCutoff("BeatModel: pair not guided over the requested range");
    a_lo_ = std::exp(ts.front());
    a_hi_ = std::exp(ts.back());
    spl_ = CubicSpline(std::move(ts), std::move(ys));
}

double BeatModel::frequency(double a) const {
    if (a < a_lo_ || a > a_hi_)
        throw std::domain_error("BeatModel: radius outside guided range");
    return std::fabs(spl_(std::log(a)));
}

double BeatModel::dfrequency_da(double a) const {
    const double h = 0.1e-9;
    const double lo = std::max(a - h, a_lo_), hi = std::min(a + h, a_hi_);
    return (frequency(hi) - frequency(lo)) / (hi - lo);
}

double BeatModel::argmax() const {
    const int n = 600;
    double best_a = a_lo_, best = -1.0;
    for (int k = 0; k < n; ++k) {
        const double a = a_lo_ * std::pow(a_hi_ / a_lo_, static_cast<double>(k) / (n - 1));
        const double f = frequency(a);
        if (f > best) {
            best = f;
            best_a = a;
        }
    }
    return best_a;
}

std::optional<double> BeatModel::crossing() const {
    const int n = 600;
    double prev_a = a_lo_;
    double prev = spl_(std::log(prev_a));
    for (int k = 1; k < n; ++k) {
        const double a = a_lo_ * std::pow(a_hi_ / a_lo_, static_cast<double>(k) / (n - 1));
        const double v = spl_(std::log(a));
        if (prev * v < 0.0) {
            const double r = bisect([this](double x) { return spl_(std::log(x)); }, prev_a, a,
                                    1e-13 * a);
            return r;
        }
        prev_a = a;
        prev = v;
    }
    return std::nullopt;
}

std::vector<BeatCurvePoint> beat_curve(const FiberSpec& fiber, const ModePair& pair,
                                       const TaperProfile& profile, double z_lo, double z_hi,
                                       std::size_t n_points) {
    if (n_points < 2) throw std::invalid_argument("beat_curve: need >= 2 points");
    const auto [amin, amax] = profile.radius_range(z_lo, z_hi);
    BeatModel model(fiber, pair, std::max(amin * 0.999, 1e-9), amax * 1.001);
    std::vector<BeatCurvePoint> out;
    out.reserve(n_points);
    for (std::size_t k = 0; k < n_points; ++k) {
        const double z = z_lo + (z_hi - z_lo) * static_cast<double>(k) / (n_points - 1);
        const double a = profile.radius_at(z);
        BeatCurvePoint p{z, std::numeric_limits<double>::quiet_NaN()};
        if (a >= model.a_lo() && a <= model.a_hi()) p.frequency = model.frequency(a);
        out.push_back(p);
    }
    return out;
}

Spectrogram spectrogram(const RsTrace& trace, Analyzer channel, double window_length,
                        double hop) {
    const auto& p = channel_of(trace, channel);
    const std::size_t wlen = static_cast<std::size_t>(std::round(window_length / trace.dz));
    const std::size_t hlen = std::max<std::size_t>(1, static_cast<std::size_t>(std::round(hop / trace.dz)));
    if (wlen < 16) throw std::invalid_argument("spectrogram: window must span >= 16 samples");
    if (wlen > p.size()) throw std::invalid_argument("spectrogram: window longer than trace");

    Spectrogram sg;
    sg.window_length = window_length;
    sg.hop = hop;
    std::vector<double> buf(wlen);
    std::vector<double> hann(wlen);
    for (std::size_t i = 0; i < wlen; ++i)
        hann[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (wlen - 1)));
    for (std::size_t start = 0; start + wlen <= p.size(); start += hlen) {
        double mean = 0.0;
        for (std::size_t i = 0; i < wlen; ++i) mean += p[start + i];
        mean /= static_cast<double>(wlen);
        for (std::size_t i = 0; i < wlen; ++i) buf[i] = (p[start + i] - mean) * hann[i];
        MagnitudeSpectrum ms = magnitude_spectrum(buf, trace.dz, 4);
        if (sg.freqs.empty()) {
            sg.freqs.resize(ms.mag.size());
            for (std::size_t i = 0; i < ms.mag.size(); ++i) sg.freqs[i] = i * ms.df;
        }
        sg.z_centers.push_back(trace.z0 + (start + 0.5 * wlen) * trace.dz);
        sg.magnitude.push_back(std::move(ms.mag));
    }
    if (sg.magnitude.empty()) throw std::invalid_argument("spectrogram: no full window fits");
    return sg;
}

namespace {

BeatPeak peak_from_spectrum(const std::vector<double>& mag, double df, double extent,
                            double snr_threshold, std::vector<BeatPeak>* all_peaks) {
    // ignore the DC foot: everything below ~1.5 transform widths
    const double fmin = 1.5 / extent;
    std::size_t i0 = static_cast<std::size_t>(std::ceil(fmin / df));
    i0 = std::max<std::size_t>(i0, 2);
    if (i0 + 2 >= mag.size()) throw NoBeatPeak("spectrum too short");
    const double noise = std::max(median_of({mag.begin() + i0, mag.end()}), 1e-300);

    std::size_t best = 0;
    double best_val = -1.0;
    std::vector<std::size_t> locals;
    for (std::size_t i = i0 + 1; i + 1 < mag.size(); ++i) {
        if (mag[i] >= mag[i - 1] && mag[i] > mag[i + 1]) {
            if (mag[i] / noise >= snr_threshold) locals.push_back(i);
            if (mag[i] > best_val) {
                best_val = mag[i];
                best = i;
            }
        }
    }
    if (locals.empty() || best == 0)
        throw NoBeatPeak("no spectral peak above SNR threshold");

    auto make_peak = [&](std::size_t i) {
        BeatPeak pk;
        pk.center = parabolic_center(mag, i, df);
        pk.fwhm = halfmax_fwhm(mag, i, df);
        pk.snr = mag[i] / noise;
        pk.window_extent = extent;
        return pk;
    };
    if (all_peaks) {
        // keep well-separated local maxima, strongest first
        std::sort(locals.begin(), locals.end(),
                  [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
        for (std::size_t i : locals) {
            bool distinct = true;
            for (const BeatPeak& q : *all_peaks)
                if (std::fabs(i * df - q.center) < 3.0 / extent) distinct = false;
            if (distinct) all_peaks->push_back(make_peak(i));
        }
    }
    return make_peak(best);
}

} // namespace

BeatPeak waist_peak(const RsTrace& trace, Analyzer channel, double z_lo, double z_hi,
                    double snr_threshold, std::vector<BeatPeak>* all_peaks) {
    double extent = 0.0;
    std::vector<double> x = slice_channel(trace, channel, z_lo, z_hi, &extent);
    if (extent < 1e-3) throw std::invalid_argument("waist_peak: span must be >= 1 mm");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double& v : x) v -= mean;
    MagnitudeSpectrum ms = magnitude_spectrum(x, trace.dz, 4);
    BeatPeak pk = peak_from_spectrum(ms.mag, ms.df, extent, snr_threshold, all_peaks);
    pk.transform_fwhm = transform_limited_fwhm(extent, trace.dz);
    if (all_peaks)
        for (BeatPeak& q : *all_peaks) q.transform_fwhm = pk.transform_fwhm;
    return pk;
}

double transform_limited_fwhm(double extent, double dz) {
    const std::size_t n = static_cast<std::size_t>(std::round(extent / dz)) + 1;
    const double f0 = 0.3 * static_cast<double>(n) / extent;  // mid-band tone
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(2.0 * M_PI * f0 * (i * dz));
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    for (double& v : x) v -= mean;
    MagnitudeSpectrum ms = magnitude_spectrum(x, dz, 4);
    std::size_t best = 0;
    for (std::size_t i = 1; i < ms.mag.size(); ++i)
        if (ms.mag[i] > ms.mag[best]) best = i;
    return halfmax_fwhm(ms.mag, best, ms.df);
}

std::vector<RidgePoint> extract_ridge(const Spectrogram& sg, double snr_threshold,
                                      int median_window) {
    std::vector<RidgePoint> raw;
    const double df = sg.freqs.size() > 1 ? sg.freqs[1] - sg.freqs[0] : 0.0;
    const double fmin = 2.0 / sg.window_length;
    for (std::size_t c = 0; c < sg.magnitude.size(); ++c) {
        const auto& col = sg.magnitude[c];
        std::size_t i0 = static_cast<std::size_t>(std::ceil(fmin / df));
        if (i0 + 2 >= col.size()) continue;
        const double noise = std::max(median_of({col.begin() + i0, col.end()}), 1e-300);
        std::size_t best = i0;
        for (std::size_t i = i0; i < col.size(); ++i)
            if (col[i] > col[best]) best = i;
        if (col[best] / noise < snr_threshold) continue;
        raw.push_back({sg.z_centers[c], parabolic_center(col, best, df)});
    }
    if (median_window > 1 && raw.size() > static_cast<std::size_t>(median_window)) {
        std::vector<RidgePoint> out = raw;
        const int half = median_window / 2;
        for (std::size_t i = 0; i < raw.size(); ++i) {
            std::vector<double> wnd;
            for (int t = -half; t <= half; ++t) {
                const long j = static_cast<long>(i) + t;
                if (j >= 0 && j < static_cast<long>(raw.size()))
                    wnd.push_back(raw[j].frequency);
            }
            out[i].frequency = median_of(std::move(wnd));
        }
        return out;
    }
    return raw;
}

namespace {

// rms mismatch of ridge vs model beat curve for a trial waist radius
double ridge_residual(const std::vector<RidgePoint>& ridge, const BeatModel& bm,
                      const TaperProfile& trial) {
    double ss = 0.0;
    std::size_t n = 0;
    for (const auto& rp : ridge) {
        double f_model;
        if (rp.z < 0.0 || rp.z > trial.total_length()) {
            f_model = 0.0;
        } else {
            const double a = trial.radius_at(rp.z);
            f_model = (a >= bm.a_lo() && a <= bm.a_hi()) ? bm.frequency(a) : 0.0;
        }
        const double d = rp.frequency - f_model;
        ss += d * d;
        ++n;
    }
    return n ? std::sqrt(ss / static_cast<double>(n)) : 1e30;
}

} // namespace

PairFit identify_pair(const std::vector<RidgePoint>& ridge, const FiberSpec& fiber,
                      const TaperProfile& profile_template, double min_ratio,
                      std::vector<PairFit>* all_fits) {
    if (ridge.size() < 10)
        throw std::invalid_argument("identify_pair: need >= 10 ridge columns");
    const nlohmann::json desc = profile_template.descriptor();

    const std::vector<ModePair> candidates = {
        {mode_he(2, 1, Parity::Even), mode_tm(1)},
        {mode_he(2, 1, Parity::Odd), mode_te(1)},
        {mode_te(1), mode_tm(1)},
        {mode_he(1, 1, Parity::Even), mode_tm(1)},
        {mode_he(1, 1, Parity::Odd), mode_te(1)},
        {mode_he(1, 1, Parity::Even), mode_he(2, 1, Parity::Even)},
    };

    std::vector<PairFit> fits;
    for (const ModePair& pair : candidates) {
        const BeatModel& bm = cached_beat_model(fiber, pair, 250e-9, 900e-9, 500);
        PairFit best{pair, 0.0, 1e30};
        // coarse scan then golden-section refinement of the trial waist radius
        const double lo = std::max(bm.a_lo() * 1.02, 300e-9), hi = 450e-9;
        for (double aw = lo; aw <= hi; aw += 2e-9) {
            nlohmann::json d = desc;
            d["aw_nm"] = aw * 1e9;
            const double r = ridge_residual(ridge, bm, TaperProfile::from_descriptor(d));
            if (r < best.residual) {
                best.residual = r;
                best.a_w = aw;
            }
        }
        double a = std::max(best.a_w - 2e-9, lo), b = std::min(best.a_w + 2e-9, hi);
        const double gr_ratio = 0.5 * (std::sqrt(5.0) - 1.0);
        auto eval = [&](double aw) {
            nlohmann::json d = desc;
            d["aw_nm"] = aw * 1e9;
            return ridge_residual(ridge, bm, TaperProfile::from_descriptor(d));
        };
        double c1 = b - gr_ratio * (b - a), c2 = a + gr_ratio * (b - a);
        double f1 = eval(c1), f2 = eval(c2);
        for (int it = 0; it < 40 && (b - a) > 0.02e-9; ++it) {
            if (f1 < f2) {
                b = c2;
                c2 = c1;
                f2 = f1;
                c1 = b - gr_ratio * (b - a);
                f1 = eval(c1);
            } else {
                a = c1;
                c1 = c2;
                f1 = f2;
                c2 = a + gr_ratio * (b - a);
                f2 = eval(c2);
            }
        }
        const double aw = 0.5 * (a + b);
        best.a_w = aw;
        best.residual = eval(aw);
        fits.push_back(best);
    }
    std::sort(fits.begin(), fits.end(),
              [](const PairFit& x, const PairFit& y) { return x.residual < y.residual; });
    if (all_fits) *all_fits = fits;
    if (fits[1].residual < min_ratio * fits[0].residual) {
        throw AmbiguousPair("identify_pair: ambiguous ridge fit",
                            fits[0].pair.first.name() + ":" + fits[0].pair.second.name(),
                            fits[1].pair.first.name() + ":" + fits[1].pair.second.name());
    }
    return fits[0];
}

nlohmann::json RadiusEstimate::to_json() const {
    return {{"aw_nm", a_w * 1e9},
            {"sigma_index_nm", sigma_index * 1e9},
            {"sigma_stat_nm", sigma_stat * 1e9},
            {"uniformity_nm", uniformity_bound * 1e9},
            {"uniformity_raw_nm", uniformity_raw * 1e9},
            {"pair", pair.first.name() + ":" + pair.second.name()}};
}

namespace {

// monotone inversion bracket for the pair: between cutoff and crossing when a
// crossing exists, otherwise the outer decreasing branch past the curve max
std::pair<double, double> inversion_bracket(const BeatModel& bm) {
    const auto cross = bm.crossing();
    if (cross) return {bm.a_lo() * 1.001, *cross - 2e-9};
    const double pk = bm.argmax();
    if (pk <= bm.a_lo() * 1.01) return {bm.a_lo() * 1.001, bm.a_hi() * 0.999};
    return {pk + 1e-9, bm.a_hi() * 0.999};
}

double invert_on_model(const BeatModel& bm, double target) {
    const auto [lo, hi] = inversion_bracket(bm);
    if (!(hi > lo)) throw std::runtime_error("invert_radius: empty inversion bracket");
    const double flo = bm.frequency(lo), fhi = bm.frequency(hi);
    const double fmin = std::min(flo, fhi), fmax = std::max(flo, fhi);
    if (target < fmin || target > fmax)
        throw std::runtime_error("invert_radius: beat frequency outside attainable range "
                                 "for this pair");
    double a = lo, b = hi;
    double fa = flo - target;
    for (int it = 0; it < 200 && (b - a) > 0.01e-9; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = bm.frequency(mid) - target;
        if (fa * fm <= 0.0) {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

const BeatModel& cached_beat_model(const FiberSpec& fiber, const ModePair& pair,
                                   double a_lo, double a_hi, int grid_n) {
    static std::map<std::string, std::unique_ptr<BeatModel>> cache;
    static std::mutex mtx;
    char key[256];
    std::snprintf(key, sizeof key, "%s:%s|%.12g|%.12g|%.12g|%.6g|%.6g|%d",
                  pair.first.name().c_str(), pair.second.name().c_str(), fiber.n_core,
                  fiber.n_clad, fiber.wavelength, a_lo, a_hi, grid_n);
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<BeatModel>(fiber, pair, a_lo, a_hi, grid_n))
                 .first;
    return *it->second;
}

RadiusEstimate invert_radius(const BeatPeak& peak, const ModePair& pair,
                             const FiberSpec& fiber, double delta_n) {
    const BeatModel& bm = cached_beat_model(fiber, pair);
    RadiusEstimate est;
    est.pair = pair;
    est.a_w = invert_on_model(bm, peak.center);

    FiberSpec up = fiber, dn = fiber;
    up.n_core += delta_n;
    dn.n_core -= delta_n;
    double spread = 0.0;
    for (const FiberSpec& f2 : {up, dn}) {
        const BeatModel& bm2 = cached_beat_model(f2, pair);
        spread = std::max(spread, std::fabs(invert_on_model(bm2, peak.center) - est.a_w));
    }
    est.sigma_index = spread;

    const double dfda = std::fabs(bm.dfrequency_da(est.a_w));
    if (dfda <= 0.0) throw std::runtime_error("invert_radius: flat beat curve at solution");
    const double center_unc = peak.fwhm / (2.0 * std::max(peak.snr, 1e-9));
    est.sigma_stat = center_unc / dfda;
    est.uniformity_raw = peak.fwhm / dfda;
    double fwhm_t = peak.transform_fwhm;
    if (fwhm_t <= 0.0 && peak.window_extent > 0.0)
        fwhm_t = 1.2067 / peak.window_extent;  // rectangular magnitude-spectrum limit
    const double excess2 = peak.fwhm * peak.fwhm - fwhm_t * fwhm_t;
    est.uniformity_bound = excess2 > 0.0 ? std::sqrt(excess2) / dfda : 0.0;
    return est;
}

} // namespace onf
