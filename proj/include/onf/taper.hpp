#pragma once

#include <string>
#include <vector>

#include "vendor_json_fwd.hpp"

namespace onf {

enum class ProfileSide { Input, Output };

// Axial radius profile a(z) of a full ONF: linear tapers at half-angle omega,
// exponential necks joining them to a constant waist, mirror-symmetric about
// the waist center. z = 0 at the start of the input linear taper.
class TaperProfile {
public:
    struct Segment {
        enum class Kind { Linear, Exponential, Waist } kind;
        double z0, z1;
        // Linear: a = a0 + slope (z - z0)
        // Exponential: a = asym + amp * exp(-(z - z0)/scale)
        // Waist: a = a0
        double a0 = 0.0, slope = 0.0;
        double asym = 0.0, amp = 0.0, scale = 0.0;
    };

    static TaperProfile build(double a0, double omega, double a_w, double L_w,
                              double neck_scale);
    // Piecewise-linear profile from (z, a) samples (externally measured/pulled).
    static TaperProfile from_table(const std::vector<double>& z,
                                   const std::vector<double>& a);

    double radius_at(double z) const;
    double slope_at(double z) const;
    double find_z_for_radius(double a, ProfileSide side) const;

    double total_length() const { return segments_.back().z1; }
    double waist_start() const { return waist_z0_; }
    double waist_end() const { return waist_z1_; }
    double waist_radius() const { return a_w_; }
    double waist_center() const { return 0.5 * (waist_z0_ + waist_z1_); }
    double max_radius() const { return a0_; }

    // Extremes of a(z) over [z_lo, z_hi].
    std::pair<double, double> radius_range(double z_lo, double z_hi) const;

    const std::vector<Segment>& segments() const { return segments_; }

    nlohmann::json descriptor() const;  // parametric form, when built
    static TaperProfile from_descriptor(const nlohmann::json& j);
    void write_csv(const std::string& path, double pitch) const;
    static TaperProfile read_csv(const std::string& path);

private:
    std::vector<Segment> segments_;
    double a0_ = 0.0, omega_ = 0.0, a_w_ = 0.0, L_w_ = 0.0, neck_ = 0.0;
    double waist_z0_ = 0.0, waist_z1_ = 0.0;
    bool parametric_ = false;
    const Segment& segment_at(double z) const;
};

} // namespace onf
