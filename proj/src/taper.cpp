#include "onf/taper.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace onf {

namespace {
// Asymptote offset of the exponential neck below a_w. The neck is truncated
// exactly at a = a_w, so joints carry no radius step; the residual slope at
// the waist joint is delta/neck_scale.
constexpr double kNeckAsymptoteOffset = 0.01e-9;
} // namespace

TaperProfile TaperProfile::build(double a0, double omega, double a_w, double L_w,
                                 double neck_scale) {
    if (!(a0 > a_w && a_w > 0.0))
        throw std::invalid_argument("TaperProfile: need a0 > a_w > 0");
    if (!(omega > 0.0 && omega <= 5e-3))
        throw std::invalid_argument("TaperProfile: omega must be in (0, 5 mrad]");
    if (L_w < 0.0) throw std::invalid_argument("TaperProfile: L_w must be >= 0");
    if (!(neck_scale > 0.0)) throw std::invalid_argument("TaperProfile: neck_scale must be > 0");

    const double tan_om = std::tan(omega);
    const double delta = kNeckAsymptoteOffset;
    const double asym = a_w - delta;
    const double a_h = asym + neck_scale * tan_om;  // slope-matching handoff radius
    if (a_h >= a0)
        throw std::invalid_argument("TaperProfile: handoff radius reaches a0 (invalid geometry)");

    const double z_h = (a0 - a_h) / tan_om;
    const double L_exp = neck_scale * std::log((a_h - asym) / delta);

    TaperProfile p;
    p.a0_ = a0;
    p.omega_ = omega;
    p.a_w_ = a_w;
    p.L_w_ = L_w;
    p.neck_ = neck_scale;
    p.parametric_ = true;

    Segment lin{Segment::Kind::Linear, 0.0, z_h, a0, -tan_om, 0, 0, 0};
    Segment neck{Segment::Kind::Exponential, z_h, z_h + L_exp, 0, 0, asym, a_h - asym, neck_scale};
    p.waist_z0_ = z_h + L_exp;
    p.waist_z1_ = p.waist_z0_ + L_w;
    Segment waist{Segment::Kind::Waist, p.waist_z0_, p.waist_z1_, a_w, 0, 0, 0, 0};
    Segment neck_out{Segment::Kind::Exponential, p.waist_z1_, p.waist_z1_ + L_exp,
                     0, 0, asym, a_h - asym, -neck_scale};  // mirrored: grows away from waist
    Segment lin_out{Segment::Kind::Linear, p.waist_z1_ + L_exp, p.waist_z1_ + L_exp + z_h,
                    a_h, tan_om, 0, 0, 0};
    p.segments_ = {lin, neck, waist, neck_out, lin_out};
    return p;
}

TaperProfile TaperProfile::from_table(const std::vector<double>& z,
                                      const std::vector<double>& a) {
    if (z.size() != a.size() || z.size() < 2)
        throw std::invalid_argument("TaperProfile::from_table: need >= 2 samples");
    TaperProfile p;
    p.parametric_ = false;
    p.segments_.reserve(z.size() - 1);
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        if (!(z[i + 1] > z[i]))
            throw std::invalid_argument("TaperProfile::from_table: z not increasing");
        Segment s{Segment::Kind::Linear, z[i] - z.front(), z[i + 1] - z.front(),
                  a[i], (a[i + 1] - a[i]) / (z[i + 1] - z[i]), 0, 0, 0};
        p.segments_.push_back(s);
    }
    const auto it = std::min_element(a.begin(), a.end());
    p.a_w_ = *it;
    p.a0_ = *std::max_element(a.begin(), a.end());
    // waist = contiguous run of samples at the minimum radius
    std::size_t i0 = it - a.begin(), i1 = i0;
    while (i1 + 1 < a.size() && a[i1 + 1] <= p.a_w_ * (1.0 + 1e-9)) ++i1;
    p.waist_z0_ = z[i0] - z.front();
    p.waist_z1_ = z[i1] - z.front();
    p.L_w_ = p.waist_z1_ - p.waist_z0_;
    return p;
}

const TaperProfile::Segment& TaperProfile::segment_at(double z) const {
    if (z < 0.0 || z > total_length() * (1.0 + 1e-12))
        throw std::domain_error("TaperProfile: z outside profile");
    for (const Segment& s : segments_)
        if (z <= s.z1) return s;
    return segments_.back();
}

double TaperProfile::radius_at(double z) const {
    const Segment& s = segment_at(z);
    switch (s.kind) {
        case Segment::Kind::Linear: return s.a0 + s.slope * (z - s.z0);
        case Segment::Kind::Waist: return s.a0;
        case Segment::Kind::Exponential: {
            if (s.scale > 0.0) {
                const double v = s.asym + s.amp * std::exp(-(z - s.z0) / s.scale);
                return z >= s.z1 ? a_w_ : std::max(v, a_w_);
            }
            // mirrored neck, measured from its far end s.z1
            const double v = s.asym + s.amp * std::exp(-(s.z1 - z) / (-s.scale));
            return z <= s.z0 ? a_w_ : std::max(v, a_w_);
        }
    }
    throw std::logic_error("TaperProfile: bad segment");
}

double TaperProfile::slope_at(double z) const {
    const Segment& s = segment_at(z);
    switch (s.kind) {
        case Segment::Kind::Linear: return s.slope;
        case Segment::Kind::Waist: return 0.0;
        case Segment::Kind::Exponential: {
            if (s.scale > 0.0)
                return -s.amp / s.scale * std::exp(-(z - s.z0) / s.scale);
            return s.amp / (-s.scale) * std::exp(-(s.z1 - z) / (-s.scale));
        }
    }
    throw std::logic_error("TaperProfile: bad segment");
}

double TaperProfile::find_z_for_radius(double a, ProfileSide side) const {
    if (a < a_w_ || a > a0_ * (1.0 + 1e-12))
        throw std::domain_error("TaperProfile: radius outside [a_w, a0]");
    double lo, hi;
    if (side == ProfileSide::Input) {
        lo = 0.0;
        hi = waist_start();
        if (a >= radius_at(lo)) return lo;
        if (a <= a_w_) return hi;
        // radius decreasing on [lo, hi]
        for (int it = 0; it < 200 && hi - lo > 0.5e-9; ++it) {
            const double mid = 0.5 * (lo + hi);
            (radius_at(mid) > a ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
    lo = waist_end();
    hi = total_length();
    if (a <= a_w_) return lo;
    if (a >= radius_at(hi)) return hi;
    for (int it = 0; it < 200 && hi - lo > 0.5e-9; ++it) {
        const double mid = 0.5 * (lo + hi);
        (radius_at(mid) < a ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> TaperProfile::radius_range(double z_lo, double z_hi) const {
    if (z_lo > z_hi) std::swap(z_lo, z_hi);
    double mn = std::min(radius_at(z_lo), radius_at(z_hi));
    double mx = std::max(radius_at(z_lo), radius_at(z_hi));
    // interior extremes can only occur at segment joints or the waist
    for (const Segment& s : segments_) {
        for (double zj : {s.z0, s.z1}) {
            if (zj >= z_lo && zj <= z_hi) {
                const double r = radius_at(zj);
                mn = std::min(mn, r);
                mx = std::max(mx, r);
            }
        }
    }
    return {mn, mx};
}

nlohmann::json TaperProfile::descriptor() const {
    if (!parametric_)
        throw std::runtime_error("TaperProfile: table profiles have no parametric descriptor");
    return {{"a0_um", a0_ * 1e6},
            {"omega_mrad", omega_ * 1e3},
            {"aw_nm", a_w_ * 1e9},
            {"Lw_mm", L_w_ * 1e3},
            {"neck_mm", neck_ * 1e3}};
}

TaperProfile TaperProfile::from_descriptor(const nlohmann::json& j) {
    return build(j.at("a0_um").get<double>() * 1e-6,
                 j.at("omega_mrad").get<double>() * 1e-3,
                 j.at("aw_nm").get<double>() * 1e-9,
                 j.at("Lw_mm").get<double>() * 1e-3,
                 j.at("neck_mm").get<double>() * 1e-3);
}

void TaperProfile::write_csv(const std::string& path, double pitch) const {
    if (!(pitch > 0.0)) throw std::invalid_argument("TaperProfile::write_csv: bad pitch");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("TaperProfile::write_csv: cannot open " + path);
    os << "z_mm,a_nm\n";
    os.precision(12);
    const double L = total_length();
    for (double z = 0.0; z <= L + 0.5 * pitch; z += pitch) {
        const double zc = std::min(z, L);
        os << zc * 1e3 << "," << radius_at(zc) * 1e9 << "\n";
    }
}

TaperProfile TaperProfile::read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("TaperProfile::read_csv: cannot open " + path);
    std::string line;
    std::vector<double> z, a;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (first && line.find("z_mm") != std::string::npos) {
            first = false;
            continue;
        }
        first = false;
        std::istringstream ls(line);
        std::string zt, at;
        if (!std::getline(ls, zt, ',') || !std::getline(ls, at, ','))
            throw std::runtime_error("TaperProfile::read_csv: malformed line: " + line);
        try {
            z.push_back(std::stod(zt) * 1e-3);
            a.push_back(std::stod(at) * 1e-9);
        } catch (const std::exception&) {
            throw std::runtime_error("TaperProfile::read_csv: malformed number in: " + line);
        }
    }
    return from_table(z, a);
}

} // namespace onf
