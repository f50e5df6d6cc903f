#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "onf/fiber.hpp"
#include "onf/modes.hpp"
#include "onf/taper.hpp"
#include "onf/vendor_json_fwd.hpp"

namespace onf {

// Complex amplitude vector over an ordered guided-mode basis.
struct ModalState {
    std::vector<ModeId> basis;
    std::vector<std::complex<double>> amps;

    double total_power() const;
    void validate_unit_norm(double tol = 1e-9) const;
};

ModalState make_state(std::vector<ModeId> basis, std::vector<std::complex<double>> amps,
                      bool renormalize = false);

struct LossEvent {
    ModeId mode;
    double z;      // ejection coordinate
    double power;  // |c|^2 lost there
};

enum class Analyzer { Longitudinal, Transverse, Total };

// Side-view Rayleigh channel: camera along +y, analyzer selects the Cartesian
// field component that radiates toward it (z-hat, x-hat, or both).
struct ScatterChannel {
    Analyzer analyzer = Analyzer::Transverse;
};

struct NoiseModel {
    double mult_sigma = 0.05;  // multiplicative fractional sigma
    double floor_frac = 0.01;  // additive sigma as fraction of waist mean power
    std::uint64_t seed = 1;
};

struct SynthParams {
    double dz = 0.5e-6;
    std::optional<double> z_start;  // default: 0
    std::optional<double> z_end;    // default: profile end
    double bulk_coeff = 1.0;
    std::optional<double> surface_coeff;  // default: calibrated (see surface_coeff_default)
    double psf_fwhm = 2.5e-6;
    std::optional<NoiseModel> noise;  // absent -> noiseless
    ScatterChannel channel;           // recorded in metadata; all channels synthesized
};

struct RsTrace {
    double z0 = 0.0;
    double dz = 0.0;
    std::vector<double> p_long, p_trans, p_total;
    nlohmann::json metadata;

    std::size_t size() const { return p_total.size(); }
    double z_at(std::size_t i) const { return z0 + dz * static_cast<double>(i); }
};

// Radius-indexed cache of local-mode dispersion and Rayleigh-scattering weight
// integrals for a fixed basis. Built once (optionally in parallel), read-only
// afterwards.
class PropagationModel {
public:
    PropagationModel(const FiberSpec& fiber, std::vector<ModeId> basis, double a_lo,
                     double a_hi, int grid_n = 2000, int n_threads = 1);
    ~PropagationModel();
    PropagationModel(PropagationModel&&) noexcept;

    const FiberSpec& fiber() const;
    const std::vector<ModeId>& basis() const;
    std::size_t n_modes() const;
    double a_lo() const;
    double a_hi() const;

    double beta(std::size_t i, double a) const;
    // cutoff radius of basis mode i, or 0 when the mode has no cutoff
    double cutoff(std::size_t i) const;
    bool guided_at(std::size_t i, double a) const;

    // cross-section and surface-ring weight integrals of the analyzer field
    // component products; channel 0 = x (transverse), 1 = z (longitudinal)
    double bulk_weight(int channel, std::size_t i, std::size_t j, double a) const;
    double surface_weight(int channel, std::size_t i, std::size_t j, double a) const;
    bool coupled(int channel, std::size_t i, std::size_t j) const;

    // max relative interpolation error of beta against direct solves (testing aid)
    double beta_interp_error(std::size_t i, int probes = 25) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// phi(z) = integral of beta(a(z')) dz' from 0 to z; throws CutoffCrossed with
// the ejection coordinate when the mode's cutoff lies inside [0, z].
double accumulated_phase(const PropagationModel& model, const TaperProfile& profile,
                         const ModeId& mode, double z, double rel_tol = 1e-9);

// Adiabatic phase evolution with instantaneous ejection at cutoff coordinates.
ModalState propagate(const PropagationModel& model, const TaperProfile& profile,
                     const ModalState& launch, double z,
                     std::vector<LossEvent>* losses = nullptr);

// Coherent local field of the propagated superposition on a transverse grid.
struct FieldMap {
    std::vector<double> xs, ys;  // grid axes
    std::vector<std::complex<double>> ex, ey, ez;  // row-major [iy][ix]
    std::size_t nx = 0, ny = 0;
};
FieldMap local_fields(const PropagationModel& model, const TaperProfile& profile,
                      const ModalState& launch, double z, double half_extent,
                      std::size_t n_per_axis);

// Polarization-resolved side-view Rayleigh-scattering trace.
RsTrace synthesize_rs_trace(const PropagationModel& model, const TaperProfile& profile,
                            const ModalState& launch, const SynthParams& params);

// surface_coeff giving surface/bulk = 10 at a_ref for an equal HE21e+TM01
// superposition in the total channel.
double surface_coeff_default(const FiberSpec& fiber, double a_ref = 360e-9);

} // namespace onf
