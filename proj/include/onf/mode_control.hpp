#pragma once

#include <array>
#include <complex>
#include <vector>

#include "onf/propagation.hpp"
#include "onf/spectral.hpp"

namespace onf {

// Complex amplitudes over the LP11 vector-mode 4-space in the fixed order
// (TM01, TE01, HE21e, HE21o), plus a fundamental-mode passenger that only
// feels the Jones polarization rotation.
struct LaunchState {
    std::array<std::complex<double>, 4> lp11{};
    std::complex<double> he11_x{};
    std::complex<double> he11_y{};

    double lp11_power() const;
    void validate_unit_norm(double tol = 1e-12) const;
};

using HwpMatrix = std::array<std::array<double, 4>, 4>;

// Action of a half-wave plate at angle alpha on the LP11 lobe basis:
//   TM01 -> cos2a HE21e + sin2a HE21o      HE21e -> cos2a TM01 + sin2a TE01
//   TE01 -> sin2a HE21e - cos2a HE21o      HE21o -> sin2a TM01 - cos2a TE01
HwpMatrix hwp_matrix(double alpha);

LaunchState apply_hwp(const LaunchState& state, double alpha);

// Interference amplitudes of the two beating pairs, normalized so an equal
// two-mode superposition gives 1: (2|c_TM||c_HE21e|, 2|c_TE||c_HE21o|).
std::pair<double, double> pair_powers(const LaunchState& state);

// Ordered basis used when converting a LaunchState for trace synthesis.
std::vector<ModeId> launch_basis(bool with_fundamental = false);
ModalState to_modal_state(const LaunchState& state);

struct HwpScan {
    std::vector<double> alphas;        // radians
    std::vector<double> freqs;         // spectrum axis, cycles/m
    std::vector<std::vector<double>> columns;  // whole-waist magnitude spectrum per alpha
    std::vector<double> band_tm;       // extracted band magnitude at the TM-pair beat
    std::vector<double> band_te;       // ... and at the TE-pair beat
    double f_tm = 0.0, f_te = 0.0;     // band center frequencies
};

// For each alpha: rotate the base state, synthesize the waist trace, take the
// whole-waist spectrum, and extract the two pair-band magnitudes.
HwpScan hwp_scan(const PropagationModel& model, const TaperProfile& profile,
                 const LaunchState& base_state, const std::vector<double>& alphas,
                 Analyzer channel, const SynthParams& params);

} // namespace onf
