#pragma once
/// @file report.hpp
/// @brief Output writers: JSON files, CSV tables, and a small self-contained
///        SVG log-log plotter (no external plotting tooling).

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace homog {

void write_json_file(const std::string& path, const nlohmann::json& j);

/// CSV with a header row; each row must match the header arity.
void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows);

struct PlotSeries {
  std::string label;
  std::vector<double> y;
};

/// Log-log polyline plot of one or more series against shared x values
/// (typically errors vs delta). Nonpositive entries are skipped.
void write_loglog_svg(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::vector<double>& x, const std::vector<PlotSeries>& series);

}  // namespace homog
