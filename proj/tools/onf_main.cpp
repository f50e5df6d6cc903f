// onf: optical nanofiber mode dispersion, Rayleigh-trace synthesis, and
// beat-frequency radius analysis.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "onf/io.hpp"
#include "onf/mode_control.hpp"
#include "onf/modes.hpp"
#include "onf/propagation.hpp"
#include "onf/spectral.hpp"
#include "onf/taper.hpp"

namespace fs = std::filesystem;
using namespace onf;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitAnalysis = 4;

struct GlobalOpts {
    std::string out_dir = ".";
    std::string config_path;
    std::uint64_t seed = 1;
    int threads = 1;
    json config = json::object();

    json cfg(const std::string& key) const {
        return config.contains(key) ? config[key] : json::object();
    }
    std::string path_for(const std::string& name) const {
        return (fs::path(out_dir) / name).string();
    }
};

FiberSpec fiber_from(const GlobalOpts& g) { return fiber_from_json(g.cfg("fiber")); }

TaperProfile profile_from(const GlobalOpts& g) {
    const json p = g.cfg("profile");
    if (p.contains("csv")) return TaperProfile::read_csv(p["csv"].get<std::string>());
    json d = {{"a0_um", p.value("a0_um", 62.5)},
              {"omega_mrad", p.value("omega_mrad", 1.0)},
              {"aw_nm", p.value("aw_nm", 360.0)},
              {"Lw_mm", p.value("Lw_mm", 5.0)},
              {"neck_mm", p.value("neck_mm", 2.0)}};
    return TaperProfile::from_descriptor(d);
}

ModalState launch_from(const GlobalOpts& g) {
    const json l = g.cfg("launch");
    if (!l.is_array() || l.empty()) {
        // default: equal HE21e + TM01 (the paper's primary beating pair)
        return make_state({mode_he(2, 1, Parity::Even), mode_tm(1)},
                          {std::sqrt(0.5), std::sqrt(0.5)});
    }
    std::vector<ModeId> basis;
    std::vector<std::complex<double>> amps;
    for (const auto& e : l) {
        basis.push_back(ModeId::parse(e.at("mode").get<std::string>()));
        amps.emplace_back(e.value("re", 0.0), e.value("im", 0.0));
    }
    return make_state(std::move(basis), std::move(amps), true);
}

SynthParams synth_from(const GlobalOpts& g, bool force_noiseless) {
    const json s = g.cfg("synth");
    SynthParams p;
    p.dz = s.value("dz_um", 0.5) * 1e-6;
    if (s.contains("z_start_mm")) p.z_start = s["z_start_mm"].get<double>() * 1e-3;
    if (s.contains("z_end_mm")) p.z_end = s["z_end_mm"].get<double>() * 1e-3;
    p.bulk_coeff = s.value("bulk_coeff", 1.0);
    if (s.contains("surface_coeff")) p.surface_coeff = s["surface_coeff"].get<double>();
    p.psf_fwhm = s.value("psf_fwhm_um", 2.5) * 1e-6;
    if (!force_noiseless && s.contains("noise") && !s["noise"].is_null()) {
        NoiseModel nm;
        nm.mult_sigma = s["noise"].value("mult_sigma", 0.05);
        nm.floor_frac = s["noise"].value("floor_frac", 0.01);
        nm.seed = s["noise"].value("seed", g.seed);
        p.noise = nm;
    }
    return p;
}

PropagationModel model_for(const GlobalOpts& g, const TaperProfile& profile,
                           const ModalState& launch, const SynthParams& sp) {
    const double z0 = sp.z_start.value_or(0.0);
    const double z1 = sp.z_end.value_or(profile.total_length());
    const auto [amin, amax] = profile.radius_range(z0, z1);
    return PropagationModel(fiber_from(g), launch.basis, amin * 0.999, amax * 1.001, 2000,
                            g.threads);
}

ModePair parse_pair(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("pair must be written like HE21e:TM01");
    return {ModeId::parse(s.substr(0, colon)), ModeId::parse(s.substr(colon + 1))};
}

void write_sidecar(const GlobalOpts& g, const std::string& name, json extra) {
    extra["config_hash"] = config_hash(g.config);
    extra["seed"] = g.seed;
    std::ofstream os(g.path_for(name));
    os << extra.dump(2) << "\n";
}

int cmd_dispersion(const GlobalOpts& g, double a_min_nm, double a_max_nm, int points) {
    const FiberSpec fiber = fiber_from(g);
    if (!(a_max_nm > a_min_nm) || points < 2) {
        std::cerr << "dispersion: empty or invalid radius range\n";
        return kExitConfig;
    }
    const auto modes = list_guided_modes(fiber, a_max_nm * 1e-9);
    std::vector<ModeId> scalar;  // one per degenerate pair
    for (const auto& m : modes)
        if (!m.hybrid() || m.parity == Parity::Even) scalar.push_back(m);

    CsvTable t;
    t.columns = {"a_nm", "V"};
    for (const auto& m : scalar) t.columns.push_back("neff_" + m.name());
    std::vector<PlotSeries> series(scalar.size());
    for (std::size_t s = 0; s < scalar.size(); ++s) series[s].label = scalar[s].name();
    for (int i = 0; i < points; ++i) {
        const double a = (a_min_nm + (a_max_nm - a_min_nm) * i / double(points - 1)) * 1e-9;
        std::vector<double> row = {a * 1e9, v_number(fiber, a)};
        for (std::size_t s = 0; s < scalar.size(); ++s) {
            double v = std::numeric_limits<double>::quiet_NaN();
            try {
                v = solve_mode(fiber, a, scalar[s]).n_eff;
            } catch (const ModeBelowCutoff&) {
            }
            row.push_back(v);
            if (std::isfinite(v)) {
                series[s].x.push_back(v_number(fiber, a));
                series[s].y.push_back(v);
            }
        }
        t.rows.push_back(std::move(row));
    }
    write_csv(g.path_for("dispersion.csv"), t);
    write_svg_plot(g.path_for("dispersion.svg"), series, "V-number", "effective index",
                   "step-index vector mode dispersion");
    write_sidecar(g, "dispersion.meta.json",
                  {{"a_min_nm", a_min_nm}, {"a_max_nm", a_max_nm}, {"points", points}});
    std::cout << "dispersion: " << scalar.size() << " mode branches over a = [" << a_min_nm
              << ", " << a_max_nm << "] nm -> " << g.path_for("dispersion.csv") << "\n";
    return 0;
}

int cmd_cutoffs(const GlobalOpts& g, double max_v) {
    const FiberSpec fiber = fiber_from(g);
    const double a_probe = max_v * fiber.wavelength /
                           (2.0 * M_PI * std::sqrt(fiber.n_core * fiber.n_core -
                                                   fiber.n_clad * fiber.n_clad));
    CsvTable t;
    t.columns = {"V_cutoff", "a_cutoff_nm"};
    std::cout << "mode     V_cutoff   a_cutoff_nm\n";
    for (const auto& m : list_guided_modes(fiber, a_probe * 1.0001)) {
        if (m.hybrid() && m.parity == Parity::Odd) continue;
        double vc = 0.0, ac = 0.0;
        try {
            vc = cutoff_v(fiber, m);
            ac = cutoff_radius(fiber, m) * 1e9;
        } catch (const ModeBelowCutoff&) {
        }
        std::printf("%-8s %-10.5f %.2f\n", m.name().c_str(), vc, ac);
        t.rows.push_back({vc, ac});
    }
    write_csv(g.path_for("cutoffs.csv"), t);
    return 0;
}

int cmd_profile(const GlobalOpts& g, const std::string& import_path, double pitch_um) {
    TaperProfile prof = import_path.empty() ? profile_from(g)
                                            : TaperProfile::read_csv(import_path);
    prof.write_csv(g.path_for("profile.csv"), pitch_um * 1e-6);
    json meta = {{"total_length_mm", prof.total_length() * 1e3},
                 {"waist_start_mm", prof.waist_start() * 1e3},
                 {"waist_end_mm", prof.waist_end() * 1e3},
                 {"aw_nm", prof.waist_radius() * 1e9}};
    try {
        meta["descriptor"] = prof.descriptor();
    } catch (const std::exception&) {
    }
    write_sidecar(g, "profile.meta.json", meta);
    std::cout << "profile: length " << prof.total_length() * 1e3 << " mm, waist "
              << prof.waist_radius() * 1e9 << " nm over ["
              << prof.waist_start() * 1e3 << ", " << prof.waist_end() * 1e3 << "] mm\n";
    return 0;
}

int cmd_beat(const GlobalOpts& g, const std::string& pair_name, int points) {
    const FiberSpec fiber = fiber_from(g);
    const ModePair pair = parse_pair(pair_name);
    const TaperProfile prof = profile_from(g);
    const auto curve = beat_curve(fiber, pair, prof, 0.0, prof.total_length(), points);

    CsvTable tz;
    tz.columns = {"z_mm", "inv_zb_per_mm"};
    PlotSeries sz{pair_name, {}, {}};
    for (const auto& p : curve) {
        tz.rows.push_back({p.z * 1e3, p.frequency * 1e-3});
        sz.x.push_back(p.z * 1e3);
        sz.y.push_back(p.frequency * 1e-3);
    }
    write_csv(g.path_for("beat_vs_z.csv"), tz);
    write_svg_plot(g.path_for("beat_vs_z.svg"), {sz}, "z (mm)", "1/z_b (1/mm)",
                   "inverse beat length along the device");

    const auto [amin, amax] = prof.radius_range(0.0, prof.total_length());
    const BeatModel bm(fiber, pair, std::max(amin * 0.999, 1e-9),
                       std::min(amax * 1.001, 900e-9));
    CsvTable ta;
    ta.columns = {"a_nm", "inv_zb_per_mm"};
    PlotSeries sa{pair_name, {}, {}};
    for (int i = 0; i < points; ++i) {
        const double a = bm.a_lo() + (bm.a_hi() - bm.a_lo()) * i / double(points - 1);
        ta.rows.push_back({a * 1e9, bm.frequency(a) * 1e-3});
        sa.x.push_back(a * 1e9);
        sa.y.push_back(bm.frequency(a) * 1e-3);
    }
    write_csv(g.path_for("beat_vs_a.csv"), ta);
    write_svg_plot(g.path_for("beat_vs_a.svg"), {sa}, "a (nm)", "1/z_b (1/mm)",
                   "inverse beat length vs radius");
    write_sidecar(g, "beat.meta.json", {{"pair", pair_name}});
    std::cout << "beat: wrote beat_vs_z.csv and beat_vs_a.csv (" << pair_name << ")\n";
    return 0;
}

int cmd_synth(const GlobalOpts& g, bool noiseless) {
    const TaperProfile prof = profile_from(g);
    const ModalState launch = launch_from(g);
    SynthParams sp = synth_from(g, noiseless);
    if (!sp.noise && !noiseless) sp.noise = NoiseModel{0.05, 0.01, g.seed};
    const PropagationModel model = model_for(g, prof, launch, sp);
    RsTrace tr = synthesize_rs_trace(model, prof, launch, sp);
    tr.metadata["config_hash"] = config_hash(g.config);
    write_trace(g.path_for("trace.csv"), tr);
    std::cout << "synth: " << tr.size() << " samples over z = [" << tr.z0 * 1e3 << ", "
              << (tr.z0 + tr.dz * (tr.size() - 1)) * 1e3 << "] mm -> "
              << g.path_for("trace.csv") << "\n";
    return 0;
}

int cmd_analyze(const GlobalOpts& g, const std::string& trace_path,
                const std::string& pair_name, double window_mm, double hop_mm,
                double delta_n, double snr) {
    const FiberSpec fiber = fiber_from(g);
    RsTrace tr = read_trace(trace_path);

    const Spectrogram sg = spectrogram(tr, Analyzer::Transverse, window_mm * 1e-3,
                                       hop_mm * 1e-3);
    write_spectrogram(g.path_for("spectrogram.csv"), sg);

    ModePair pair{};
    json fits_j = json::array();
    if (!pair_name.empty()) {
        pair = parse_pair(pair_name);
    } else {
        const auto ridge = extract_ridge(sg, snr);
        TaperProfile templ = tr.metadata.contains("profile") && !tr.metadata["profile"].is_null()
                                 ? TaperProfile::from_descriptor(tr.metadata["profile"])
                                 : profile_from(g);
        std::vector<PairFit> fits;
        const PairFit best = identify_pair(ridge, fiber, templ, 1.5, &fits);
        pair = best.pair;
        for (const auto& f : fits)
            fits_j.push_back({{"pair", f.pair.first.name() + ":" + f.pair.second.name()},
                              {"aw_nm", f.a_w * 1e9},
                              {"residual_per_mm", f.residual * 1e-3}});
        std::cout << "analyze: identified pair " << pair.first.name() << ":"
                  << pair.second.name() << "\n";
    }

    double z_lo = tr.z0, z_hi = tr.z0 + tr.dz * (tr.size() - 1);
    if (tr.metadata.contains("waist_start_mm")) {
        z_lo = std::max(z_lo, tr.metadata["waist_start_mm"].get<double>() * 1e-3);
        z_hi = std::min(z_hi, tr.metadata["waist_end_mm"].get<double>() * 1e-3);
    }
    const BeatPeak pk = waist_peak(tr, Analyzer::Transverse, z_lo, z_hi, snr);
    const RadiusEstimate est = invert_radius(pk, pair, fiber, delta_n);
    json out = est.to_json();
    out["peak"] = {{"center_per_mm", pk.center * 1e-3},
                   {"fwhm_per_mm", pk.fwhm * 1e-3},
                   {"snr", pk.snr},
                   {"window_extent_mm", pk.window_extent * 1e3}};
    if (!fits_j.empty()) out["candidate_fits"] = fits_j;
    write_sidecar(g, "estimate.json", out);
    std::cout << "analyze: a_w = " << est.a_w * 1e9 << " nm (sigma_index "
              << est.sigma_index * 1e9 << " nm, sigma_stat " << est.sigma_stat * 1e9
              << " nm, uniformity " << est.uniformity_bound * 1e9 << " nm)\n";
    return 0;
}

int cmd_hwpscan(const GlobalOpts& g, double a_start_deg, double a_stop_deg,
                double a_step_deg, const std::string& channel_name, bool noiseless) {
    const TaperProfile prof = profile_from(g);
    SynthParams sp = synth_from(g, noiseless);
    if (!sp.z_start) {
        // default: a window just covering the waist
        sp.z_start = std::max(0.0, prof.waist_start() - 0.5e-3);
        sp.z_end = std::min(prof.total_length(), prof.waist_end() + 0.5e-3);
    }
    Analyzer ch = Analyzer::Transverse;
    if (channel_name == "longitudinal") ch = Analyzer::Longitudinal;
    else if (channel_name == "total") ch = Analyzer::Total;
    else if (channel_name != "transverse") {
        std::cerr << "hwpscan: unknown channel '" << channel_name << "'\n";
        return kExitConfig;
    }

    LaunchState base;
    base.lp11 = {std::sqrt(0.5), 0.0, std::sqrt(0.5), 0.0};  // equal TM01 + HE21e
    std::vector<double> alphas;
    if (a_step_deg > 0.0)
        for (double a = a_start_deg; a <= a_stop_deg + 1e-9; a += a_step_deg)
            alphas.push_back(a * M_PI / 180.0);
    if (alphas.empty()) {
        std::cerr << "hwpscan: empty alpha grid\n";
        return kExitConfig;
    }

    const ModalState ms = to_modal_state(base);
    const PropagationModel model = model_for(g, prof, ms, sp);
    const HwpScan scan = hwp_scan(model, prof, base, alphas, ch, sp);

    std::ofstream os(g.path_for("hwpscan.csv"));
    os << "freq_per_mm";
    for (double a : scan.alphas) os << "," << a * 180.0 / M_PI;
    os << "\n";
    os.precision(10);
    for (std::size_t i = 0; i < scan.freqs.size(); ++i) {
        if (scan.freqs[i] > 150e3) break;  // keep the file at the interesting band
        os << scan.freqs[i] * 1e-3;
        for (const auto& col : scan.columns) os << "," << col[i];
        os << "\n";
    }
    CsvTable bands;
    bands.columns = {"alpha_deg", "band_tm_pair", "band_te_pair"};
    PlotSeries stm{"HE21e:TM01", {}, {}}, ste{"HE21o:TE01", {}, {}};
    for (std::size_t i = 0; i < scan.alphas.size(); ++i) {
        const double deg = scan.alphas[i] * 180.0 / M_PI;
        bands.rows.push_back({deg, scan.band_tm[i], scan.band_te[i]});
        stm.x.push_back(deg);
        stm.y.push_back(scan.band_tm[i]);
        ste.x.push_back(deg);
        ste.y.push_back(scan.band_te[i]);
    }
    write_csv(g.path_for("hwpscan_bands.csv"), bands);
    write_svg_plot(g.path_for("hwpscan_bands.svg"), {stm, ste}, "HWP angle (deg)",
                   "band magnitude", "pair conversion vs half-wave-plate angle");
    write_sidecar(g, "hwpscan.meta.json",
                  {{"channel", channel_name},
                   {"f_tm_per_mm", scan.f_tm * 1e-3},
                   {"f_te_per_mm", scan.f_te * 1e-3}});
    std::cout << "hwpscan: " << scan.alphas.size() << " angles, bands at " << scan.f_tm * 1e-3
              << " and " << scan.f_te * 1e-3 << " 1/mm\n";
    return 0;
}

int cmd_fit_radius(const GlobalOpts& g, const std::string& pair_name, double center_mm,
                   double fwhm_mm, double snr, double extent_mm, double delta_n) {
    const FiberSpec fiber = fiber_from(g);
    BeatPeak pk;
    pk.center = center_mm * 1e3;
    pk.fwhm = fwhm_mm * 1e3;
    pk.snr = snr;
    pk.window_extent = extent_mm * 1e-3;
    const RadiusEstimate est = invert_radius(pk, parse_pair(pair_name), fiber, delta_n);
    write_sidecar(g, "estimate.json", est.to_json());
    std::cout << "fit-radius: a_w = " << est.a_w * 1e9 << " nm, sigma_index "
              << est.sigma_index * 1e9 << " nm, sigma_stat " << est.sigma_stat * 1e9
              << " nm, uniformity " << est.uniformity_bound * 1e9 << " nm\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"optical nanofiber mode dispersion, Rayleigh trace synthesis, and "
                 "beat-frequency radius analysis"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--config", g.config_path, "run configuration JSON");
    app.add_option("--seed", g.seed, "noise seed");
    app.add_option("--threads", g.threads, "worker thread cap");

    double a_min_nm = 200, a_max_nm = 964, max_v = 8.0, pitch_um = 10.0;
    int points = 200;
    std::string pair_name, import_path, trace_path, channel_name = "transverse";
    double window_mm = 0.5, hop_mm = 0.1, delta_n = 0.005, snr = 5.0;
    double center_mm = 0, fwhm_mm = 0, peak_snr = 50, extent_mm = 5;
    bool noiseless = false;

    auto* disp = app.add_subcommand("dispersion", "n_eff curves for all guided modes");
    disp->add_option("--a-min-nm", a_min_nm);
    disp->add_option("--a-max-nm", a_max_nm);
    disp->add_option("--points", points);

    auto* cut = app.add_subcommand("cutoffs", "cutoff V and radius per mode");
    cut->add_option("--max-v", max_v);

    auto* profc = app.add_subcommand("profile", "build or import a taper profile");
    profc->add_option("--import", import_path, "CSV (z_mm, a_nm) to import");
    profc->add_option("--pitch-um", pitch_um, "export pitch");

    auto* beat = app.add_subcommand("beat", "inverse beat length vs z and radius");
    beat->add_option("--pair", pair_name, "e.g. HE21e:TM01")->required();
    beat->add_option("--points", points);

    auto* synth = app.add_subcommand("synth", "synthesize a Rayleigh-scattering trace");
    synth->add_flag("--noiseless", noiseless);

    auto* ana = app.add_subcommand("analyze", "spectrogram + radius estimate from a trace");
    ana->add_option("--trace", trace_path)->required();
    ana->add_option("--pair", pair_name, "skip ridge classification");
    ana->add_option("--window-mm", window_mm);
    ana->add_option("--hop-mm", hop_mm);
    ana->add_option("--delta-n", delta_n);
    ana->add_option("--snr", snr);

    double a_start_deg = 0, a_stop_deg = 90, a_step_deg = 2;
    auto* hwp = app.add_subcommand("hwpscan", "HWP rotation scan of waist spectra");
    hwp->add_option("--alpha-start", a_start_deg);
    hwp->add_option("--alpha-stop", a_stop_deg);
    hwp->add_option("--alpha-step", a_step_deg);
    hwp->add_option("--channel", channel_name, "longitudinal|transverse|total");
    hwp->add_flag("--noiseless", noiseless);

    auto* fit = app.add_subcommand("fit-radius", "invert a measured beat peak to a radius");
    fit->add_option("--pair", pair_name)->required();
    fit->add_option("--center", center_mm, "peak center (1/mm)")->required();
    fit->add_option("--fwhm", fwhm_mm, "peak FWHM (1/mm)")->required();
    fit->add_option("--snr", peak_snr);
    fit->add_option("--extent-mm", extent_mm, "window extent behind the peak");
    fit->add_option("--delta-n", delta_n);

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();
    CLI11_PARSE(app, argc, argv);

    try {
        if (!g.config_path.empty()) {
            std::ifstream is(g.config_path);
            if (!is) {
                std::cerr << "cannot open config " << g.config_path << "\n";
                return kExitConfig;
            }
            g.config = json::parse(is, nullptr, false);
            if (g.config.is_discarded()) {
                std::cerr << "config is not valid JSON: " << g.config_path << "\n";
                return kExitConfig;
            }
        }
        fs::create_directories(g.out_dir);

        if (disp->parsed()) return cmd_dispersion(g, a_min_nm, a_max_nm, points);
        if (cut->parsed()) return cmd_cutoffs(g, max_v);
        if (profc->parsed()) return cmd_profile(g, import_path, pitch_um);
        if (beat->parsed()) return cmd_beat(g, pair_name, points);
        if (synth->parsed()) return cmd_synth(g, noiseless);
        if (ana->parsed())
            return cmd_analyze(g, trace_path, pair_name, window_mm, hop_mm, delta_n, snr);
        if (hwp->parsed())
            return cmd_hwpscan(g, a_start_deg, a_stop_deg, a_step_deg, channel_name, noiseless);
        if (fit->parsed())
            return cmd_fit_radius(g, pair_name, center_mm, fwhm_mm, peak_snr, extent_mm, delta_n);
    } catch (const NoBeatPeak& e) {
        std::cerr << "analysis failure: " << e.what() << "\n";
        return kExitAnalysis;
    } catch (const AmbiguousPair& e) {
        std::cerr << "analysis failure: " << e.what() << " (candidates " << e.first << " and "
                  << e.second << ")\n";
        return kExitAnalysis;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
