#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace onf {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kMu0 = 4.0e-7 * 3.14159265358979323846;
inline constexpr double kEps0 = 1.0 / (kMu0 * kSpeedOfLight * kSpeedOfLight);

// Radius-independent description of a two-layer step-index guide. For the
// nanofiber waist the "core" is the glass and the "cladding" is air; for the
// unmodified fiber it is the doped core inside the glass cladding.
struct FiberSpec {
    double n_core = 1.45;
    double n_clad = 1.0;
    double wavelength = 795e-9;          // meters
    double core_clad_ratio = 1.8 / 25.0; // used only by the core-escape estimator

    double k() const { return 2.0 * M_PI / wavelength; }

    void validate() const {
        if (!(n_core > n_clad) || !(n_clad >= 1.0))
            throw std::invalid_argument("FiberSpec: need n_core > n_clad >= 1");
        if (!(wavelength > 0.0))
            throw std::invalid_argument("FiberSpec: wavelength must be positive");
        if (!(core_clad_ratio > 0.0 && core_clad_ratio < 1.0))
            throw std::invalid_argument("FiberSpec: core_clad_ratio must be in (0,1)");
    }
};

enum class ModeFamily { HE, EH, TE, TM };
enum class Parity { Even, Odd, None };

struct ModeId {
    ModeFamily family = ModeFamily::HE;
    int azimuthal = 1;  // nu; 0 for TE/TM
    int radial = 1;     // m >= 1
    Parity parity = Parity::Even;

    bool hybrid() const { return family == ModeFamily::HE || family == ModeFamily::EH; }

    void validate() const {
        if (radial < 1) throw std::invalid_argument("ModeId: radial order must be >= 1");
        if (hybrid()) {
            if (azimuthal < 1 || parity == Parity::None)
                throw std::invalid_argument("ModeId: hybrid modes need nu >= 1 and a parity");
        } else {
            if (azimuthal != 0 || parity != Parity::None)
                throw std::invalid_argument("ModeId: TE/TM modes need nu = 0 and no parity");
        }
    }

    // e.g. "HE21e", "TE01"
    std::string name() const;
    static ModeId parse(const std::string& s);

    // parity-independent key (even/odd share one dispersion root)
    int scalar_key() const {
        return (static_cast<int>(family) << 16) | (azimuthal << 8) | radial;
    }
    bool operator==(const ModeId& o) const {
        return family == o.family && azimuthal == o.azimuthal && radial == o.radial &&
               parity == o.parity;
    }
};

inline ModeId mode_te(int m = 1) { return {ModeFamily::TE, 0, m, Parity::None}; }
inline ModeId mode_tm(int m = 1) { return {ModeFamily::TM, 0, m, Parity::None}; }
inline ModeId mode_he(int nu, int m, Parity p = Parity::Even) { return {ModeFamily::HE, nu, m, p}; }
inline ModeId mode_eh(int nu, int m, Parity p = Parity::Even) { return {ModeFamily::EH, nu, m, p}; }

// A required mode is not guided at the requested radius.
struct ModeBelowCutoff : std::runtime_error {
    explicit ModeBelowCutoff(const std::string& what) : std::runtime_error(what) {}
};

// Propagation crossed a mode's cutoff radius inside the requested span.
struct CutoffCrossed : std::runtime_error {
    CutoffCrossed(const std::string& what, double z) : std::runtime_error(what), ejection_z(z) {}
    double ejection_z;
};

struct NoBeatPeak : std::runtime_error {
    explicit NoBeatPeak(const std::string& what) : std::runtime_error(what) {}
};

struct AmbiguousPair : std::runtime_error {
    AmbiguousPair(const std::string& what, std::string a, std::string b)
        : std::runtime_error(what), first(std::move(a)), second(std::move(b)) {}
    std::string first, second;
};

} // namespace onf
