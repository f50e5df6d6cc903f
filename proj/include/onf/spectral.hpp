#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "onf/fiber.hpp"
#include "onf/numerics.hpp"
#include "onf/propagation.hpp"
#include "onf/taper.hpp"

namespace onf {

using ModePair = std::pair<ModeId, ModeId>;

// 1/z_b = |n_eff,1 - n_eff,2| / lambda   (cycles per meter)
double pair_beat_frequency(const FiberSpec& fiber, const ModePair& pair, double radius);

// Spline-backed |delta n_eff|(a)/lambda over the pair's guided range; used by
// curve fits and inversion bracketing.
class BeatModel {
public:
    BeatModel(const FiberSpec& fiber, const ModePair& pair, double a_lo, double a_hi,
              int grid_n = 400);
    double frequency(double a) const;       // cycles/m
    double dfrequency_da(double a) const;   // central difference, 0.1 nm step
    double a_lo() const { return a_lo_; }
    double a_hi() const { return a_hi_; }
    // radius of the curve's interior maximum, or a_lo when monotone
    double argmax() const;
    // crossing radius (zero of delta n_eff) if present
    std::optional<double> crossing() const;
    const ModePair& pair() const { return pair_; }

private:
    ModePair pair_;
    CubicSpline spl_;  // signed delta n_eff / lambda on ln(a)
    double a_lo_, a_hi_;
};

struct BeatCurvePoint {
    double z;
    double frequency;  // NaN where the pair is not guided
};
std::vector<BeatCurvePoint> beat_curve(const FiberSpec& fiber, const ModePair& pair,
                                       const TaperProfile& profile, double z_lo, double z_hi,
                                       std::size_t n_points);

struct Spectrogram {
    double window_length = 0.0;
    double hop = 0.0;
    std::vector<double> z_centers;
    std::vector<double> freqs;
    std::vector<std::vector<double>> magnitude;  // [column][freq bin]
};

// Hann-tapered, mean-subtracted, 4x zero-padded magnitude spectrogram.
Spectrogram spectrogram(const RsTrace& trace, Analyzer channel, double window_length,
                        double hop);

struct BeatPeak {
    double center = 0.0;  // cycles/m
    double fwhm = 0.0;
    double snr = 0.0;
    double window_extent = 0.0;    // spatial extent that produced the peak
    double transform_fwhm = 0.0;   // measured pure-tone FWHM at the same extent
};

// Untapered magnitude periodogram over [z_lo, z_hi]; parabolic peak center,
// half-max-crossing FWHM. Throws NoBeatPeak below the SNR threshold. When
// all_peaks is given, every local maximum above threshold is reported.
BeatPeak waist_peak(const RsTrace& trace, Analyzer channel, double z_lo, double z_hi,
                    double snr_threshold = 5.0, std::vector<BeatPeak>* all_peaks = nullptr);

// Measured FWHM of the same periodogram applied to a pure tone (transform limit).
double transform_limited_fwhm(double extent, double dz);

struct RidgePoint {
    double z;
    double frequency;
};
std::vector<RidgePoint> extract_ridge(const Spectrogram& sg, double snr_threshold = 5.0,
                                      int median_window = 5);

struct PairFit {
    ModePair pair;
    double a_w = 0.0;
    double residual = 0.0;  // rms ridge mismatch, cycles/m
};

// Least-squares ridge-shape match over the candidate pair set with a_w as the
// only free parameter (profile rebuilt around each trial a_w). Throws
// AmbiguousPair when the two best candidates are closer than min_ratio.
PairFit identify_pair(const std::vector<RidgePoint>& ridge, const FiberSpec& fiber,
                      const TaperProfile& profile_template, double min_ratio = 1.5,
                      std::vector<PairFit>* all_fits = nullptr);

struct RadiusEstimate {
    double a_w = 0.0;
    double sigma_index = 0.0;
    double sigma_stat = 0.0;
    double uniformity_bound = 0.0;      // transform width deconvolved in quadrature
    double uniformity_raw = 0.0;        // raw fwhm / |df/da|
    ModePair pair;
    nlohmann::json to_json() const;
};

RadiusEstimate invert_radius(const BeatPeak& peak, const ModePair& pair,
                             const FiberSpec& fiber, double delta_n = 0.005);

// Shared immutable BeatModel cache (inversion and classification reuse these).
const BeatModel& cached_beat_model(const FiberSpec& fiber, const ModePair& pair,
                                   double a_lo = 250e-9, double a_hi = 900e-9,
                                   int grid_n = 500);

} // namespace onf
