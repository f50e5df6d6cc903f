#pragma once

#include <string>
#include <vector>

#include "onf/fiber.hpp"
#include "onf/propagation.hpp"
#include "onf/spectral.hpp"
#include "onf/taper.hpp"
#include "onf/vendor_json_fwd.hpp"

namespace onf {

// plain CSV table: header row + numeric columns
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

// RsTrace <-> CSV (z_mm, p_long, p_trans, p_total) with JSON metadata sidecar.
void write_trace(const std::string& csv_path, const RsTrace& trace);
RsTrace read_trace(const std::string& csv_path);

void write_spectrogram(const std::string& csv_path, const Spectrogram& sg);

// FNV-1a over a canonical dump; recorded in every output sidecar.
std::string config_hash(const nlohmann::json& config);

FiberSpec fiber_from_json(const nlohmann::json& j);
nlohmann::json fiber_to_json(const FiberSpec& f);

// minimal standalone SVG line plot
struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};
void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
                    const std::string& x_label, const std::string& y_label,
                    const std::string& title);

} // namespace onf
