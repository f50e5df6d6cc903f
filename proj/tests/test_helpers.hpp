#pragma once

#include <cmath>

#include "onf/mode_control.hpp"
#include "onf/modes.hpp"
#include "onf/propagation.hpp"
#include "onf/spectral.hpp"
#include "onf/taper.hpp"

namespace onf::test {

inline FiberSpec glass_air() { return FiberSpec{1.45, 1.0, 795e-9, 1.8 / 25.0}; }

// SM1500-like unmodified fiber: core index chosen so V = 3.8 at a = 1.8 um.
inline FiberSpec sm1500_core() { return FiberSpec{1.474407, 1.45, 795e-9, 1.8 / 25.0}; }

// Waist device used by several tests: 0.6 mm neck keeps the interesting ridge
// structure within a few mm of the waist.
inline TaperProfile waist_device(double aw_nm, double Lw_mm = 5.0, double neck_mm = 0.6) {
    return TaperProfile::build(62.5e-6, 1e-3, aw_nm * 1e-9, Lw_mm * 1e-3, neck_mm * 1e-3);
}

inline ModalState tm_pair_launch() {
    return make_state({mode_he(2, 1, Parity::Even), mode_tm(1)},
                      {std::sqrt(0.5), std::sqrt(0.5)});
}

inline ModalState te_pair_launch() {
    return make_state({mode_he(2, 1, Parity::Odd), mode_te(1)},
                      {std::sqrt(0.5), std::sqrt(0.5)});
}

// Shared propagation model over the LP11 basis for the standard waist devices.
inline const PropagationModel& lp11_model() {
    static PropagationModel model(glass_air(), launch_basis(false), 334e-9, 1.1e-6, 2000, 4);
    return model;
}

inline SynthParams noiseless_params(const TaperProfile& prof, double margin_mm = 6.5,
                                    double dz_um = 1.0) {
    SynthParams p;
    p.dz = dz_um * 1e-6;
    p.z_start = prof.waist_start() - margin_mm * 1e-3;
    p.z_end = prof.waist_end() + margin_mm * 1e-3;
    p.psf_fwhm = 2.5e-6;
    return p;
}

} // namespace onf::test
