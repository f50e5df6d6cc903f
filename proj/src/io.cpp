#include "onf/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace onf {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        os << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << fmt_double(row[i]) << (i + 1 < row.size() ? "," : "");
        os << "\n";
    }
    if (!os) throw std::runtime_error("write_csv: write failed for " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_csv: cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("read_csv: empty file " + path);
    std::istringstream hs(line);
    std::string tok;
    while (std::getline(hs, tok, ',')) t.columns.push_back(tok);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<double> row;
        while (std::getline(ls, tok, ',')) {
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(tok, &pos);
            } catch (const std::exception&) {
                throw std::runtime_error("read_csv: malformed number '" + tok + "' in " + path);
            }
            if (pos != tok.size())
                throw std::runtime_error("read_csv: malformed number '" + tok + "' in " + path);
            row.push_back(v);
        }
        if (row.size() != t.columns.size())
            throw std::runtime_error("read_csv: ragged row in " + path);
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_trace(const std::string& csv_path, const RsTrace& trace) {
    CsvTable t;
    t.columns = {"z_mm", "p_long", "p_trans", "p_total"};
    t.rows.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i)
        t.rows.push_back({trace.z_at(i) * 1e3, trace.p_long[i], trace.p_trans[i],
                          trace.p_total[i]});
    write_csv(csv_path, t);
    std::ofstream ms(csv_path + ".meta.json");
    if (!ms) throw std::runtime_error("write_trace: cannot open metadata sidecar");
    ms << trace.metadata.dump(2) << "\n";
}

RsTrace read_trace(const std::string& csv_path) {
    const CsvTable t = read_csv(csv_path);
    if (t.columns != std::vector<std::string>{"z_mm", "p_long", "p_trans", "p_total"})
        throw std::runtime_error("read_trace: unexpected columns in " + csv_path);
    if (t.rows.size() < 2) throw std::runtime_error("read_trace: too few samples");
    RsTrace tr;
    tr.z0 = t.rows.front()[0] * 1e-3;
    tr.dz = (t.rows[1][0] - t.rows[0][0]) * 1e-3;
    if (!(tr.dz > 0.0)) throw std::runtime_error("read_trace: non-increasing z");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (i > 1) {
            const double step = (t.rows[i][0] - t.rows[i - 1][0]) * 1e-3;
            if (std::fabs(step - tr.dz) > 1e-6 * tr.dz + 1e-12)
                throw std::runtime_error("read_trace: non-uniform pitch");
        }
        tr.p_long.push_back(t.rows[i][1]);
        tr.p_trans.push_back(t.rows[i][2]);
        tr.p_total.push_back(t.rows[i][3]);
    }
    std::ifstream ms(csv_path + ".meta.json");
    if (ms) tr.metadata = nlohmann::json::parse(ms, nullptr, false);
    if (tr.metadata.is_discarded()) tr.metadata = nlohmann::json::object();
    return tr;
}

void write_spectrogram(const std::string& csv_path, const Spectrogram& sg) {
    std::ofstream os(csv_path);
    if (!os) throw std::runtime_error("write_spectrogram: cannot open " + csv_path);
    os << "freq_per_mm";
    for (double z : sg.z_centers) os << "," << fmt_double(z * 1e3);
    os << "\n";
    for (std::size_t i = 0; i < sg.freqs.size(); ++i) {
        os << fmt_double(sg.freqs[i] * 1e-3);
        for (const auto& col : sg.magnitude) os << "," << fmt_double(col[i]);
        os << "\n";
    }
    nlohmann::json axes = {{"window_mm", sg.window_length * 1e3},
                           {"hop_mm", sg.hop * 1e3},
                           {"n_columns", sg.z_centers.size()},
                           {"n_freqs", sg.freqs.size()}};
    std::ofstream as(csv_path + ".axes.json");
    as << axes.dump(2) << "\n";
}

std::string config_hash(const nlohmann::json& config) {
    const std::string dump = config.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

FiberSpec fiber_from_json(const nlohmann::json& j) {
    FiberSpec f;
    f.n_core = j.value("n_core", 1.45);
    f.n_clad = j.value("n_clad", 1.0);
    f.wavelength = j.value("wavelength_nm", 795.0) * 1e-9;
    f.core_clad_ratio = j.value("core_clad_ratio", 1.8 / 25.0);
    f.validate();
    return f;
}

nlohmann::json fiber_to_json(const FiberSpec& f) {
    return {{"n_core", f.n_core},
            {"n_clad", f.n_clad},
            {"wavelength_nm", f.wavelength * 1e9},
            {"core_clad_ratio", f.core_clad_ratio}};
}

void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
                    const std::string& x_label, const std::string& y_label,
                    const std::string& title) {
    const int W = 720, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (xmin >= xmax) { xmin -= 1.0; xmax += 1.0; }
    if (ymin >= ymax) { ymin -= 1.0; ymax += 1.0; }
    const double xr = xmax - xmin, yr = ymax - ymin;
    xmin -= 0.03 * xr; xmax += 0.03 * xr;
    ymin -= 0.05 * yr; ymax += 0.05 * yr;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b"};
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_svg_plot: cannot open " + path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
       << "' viewBox='0 0 " << W << " " << H << "'>\n"
       << "<rect width='100%' height='100%' fill='white'/>\n"
       << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
       << "</text>\n";
    // axes
    os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
       << "' stroke='black'/>\n"
       << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
       << "' stroke='black'/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 5.0;
        const double yv = ymin + (ymax - ymin) * t / 5.0;
        char xb[32], yb[32];
        std::snprintf(xb, sizeof xb, "%.4g", xv);
        std::snprintf(yb, sizeof yb, "%.4g", yv);
        os << "<text x='" << px(xv) << "' y='" << H - mb + 18
           << "' text-anchor='middle' font-size='11'>" << xb << "</text>\n"
           << "<text x='" << ml - 8 << "' y='" << py(yv) + 4
           << "' text-anchor='end' font-size='11'>" << yb << "</text>\n";
    }
    os << "<text x='" << (W + ml - mr) / 2 << "' y='" << H - 12
       << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n"
       << "<text x='16' y='" << (H + mt - mb) / 2
       << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 "
       << (H + mt - mb) / 2 << ")'>" << y_label << "</text>\n";
    int ci = 0;
    for (const auto& s : series) {
        const char* color = colors[ci % 6];
        os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        bool pen_up = true;
        std::ostringstream seg;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                if (!pen_up) {
                    os << seg.str() << "'/>\n<polyline fill='none' stroke='" << color
                       << "' stroke-width='1.5' points='";
                    seg.str("");
                }
                pen_up = true;
                continue;
            }
            seg << px(s.x[i]) << "," << py(s.y[i]) << " ";
            pen_up = false;
        }
        os << seg.str() << "'/>\n";
        if (!s.label.empty())
            os << "<text x='" << W - mr - 8 << "' y='" << mt + 16 + 16 * ci
               << "' text-anchor='end' font-size='12' fill='" << color << "'>" << s.label
               << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
}

} // namespace onf
