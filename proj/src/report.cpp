#include "homog/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "homog/common.hpp"

namespace homog {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open output file: " + path);
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void write_json_file(const std::string& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw config_error("failed writing: " + path);
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw config_error("csv row arity " + std::to_string(row.size()) + " does not match header " +
                         std::to_string(header.size()));
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << num(row[i]);
    out << '\n';
  }
  if (!out) throw config_error("failed writing: " + path);
}

void write_loglog_svg(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::vector<double>& x, const std::vector<PlotSeries>& series) {
  const int W = 640, H = 440;
  const double ml = 70, mr = 20, mt = 40, mb = 50;  // margins

  // Collect log10 ranges over positive entries only.
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool any = false;
  for (double xv : x)
    if (xv > 0) {
      double l = std::log10(xv);
      xmin = any ? std::min(xmin, l) : l;
      xmax = any ? std::max(xmax, l) : l;
      any = true;
    }
  bool anyy = false;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.y.size() && i < x.size(); ++i)
      if (s.y[i] > 0 && x[i] > 0) {
        double l = std::log10(s.y[i]);
        ymin = anyy ? std::min(ymin, l) : l;
        ymax = anyy ? std::max(ymax, l) : l;
        anyy = true;
      }
  if (!any || !anyy) {
    xmin = -1;
    xmax = 0;
    ymin = -1;
    ymax = 0;
  }
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) ymax = ymin + 1;

  auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double ly) { return H - mb - (ly - ymin) / (ymax - ymin) * (H - mt - mb); };

  static const char* COLORS[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">"
      << title << "</text>\n";
  // Axes box.
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << (W - ml - mr) << "\" height=\""
      << (H - mt - mb) << "\" fill=\"none\" stroke=\"black\"/>\n";
  // Decade grid lines and tick labels.
  for (int d = static_cast<int>(std::ceil(xmin)); d <= static_cast<int>(std::floor(xmax)); ++d) {
    double X = px(d);
    out << "<line x1=\"" << X << "\" y1=\"" << mt << "\" x2=\"" << X << "\" y2=\"" << (H - mb)
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << X << "\" y=\"" << (H - mb + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" << d
        << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(ymin)); d <= static_cast<int>(std::floor(ymax)); ++d) {
    double Y = py(d);
    out << "<line x1=\"" << ml << "\" y1=\"" << Y << "\" x2=\"" << (W - mr) << "\" y2=\"" << Y
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << (ml - 6) << "\" y=\"" << (Y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << d
        << "</text>\n";
  }
  out << "<text x=\"" << W / 2 << "\" y=\"" << (H - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
      << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* col = COLORS[si % 5];
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.y.size() && i < x.size(); ++i) {
      if (!(x[i] > 0) || !(s.y[i] > 0)) continue;
      pts << px(std::log10(x[i])) << ',' << py(std::log10(s.y[i])) << ' ';
    }
    out << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << col
        << "\" stroke-width=\"1.5\"/>\n";
    for (std::size_t i = 0; i < s.y.size() && i < x.size(); ++i) {
      if (!(x[i] > 0) || !(s.y[i] > 0)) continue;
      out << "<circle cx=\"" << px(std::log10(x[i])) << "\" cy=\"" << py(std::log10(s.y[i]))
          << "\" r=\"3\" fill=\"" << col << "\"/>\n";
    }
    double ly = mt + 16 + 16 * static_cast<double>(si);
    out << "<line x1=\"" << (ml + 8) << "\" y1=\"" << ly << "\" x2=\"" << (ml + 28) << "\" y2=\""
        << ly << "\" stroke=\"" << col << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << (ml + 34) << "\" y=\"" << (ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw config_error("failed writing: " + path);
}

}  // namespace homog
