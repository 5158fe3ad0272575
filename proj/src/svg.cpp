#include "perturbmap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace perturbmap {

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<int>(i);
    }
    throw std::invalid_argument("plot: csv is missing column '" + name + "'");
  }
};

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_fields(line);
    if (csv.header.empty()) {
      csv.header = fields;
      continue;
    }
    if (fields.size() != csv.header.size()) {
      throw std::invalid_argument("plot: row has wrong number of fields: " + line);
    }
    std::vector<double> row;
    for (const auto& f : fields) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(f, &used));
        if (used != f.size()) throw std::invalid_argument(f);
      } catch (const std::exception&) {
        throw std::invalid_argument("plot: malformed number '" + f + "'");
      }
    }
    csv.rows.push_back(std::move(row));
  }
  if (csv.header.empty()) {
    throw std::invalid_argument("plot: csv has no header");
  }
  return csv;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Round tick spacing to 1/2/5 x 10^k giving at most ~6 intervals.
double nice_step(double range) {
  if (!(range > 0.0)) return 1.0;
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= mult * mag) return mult * mag;
  }
  return 10.0 * mag;
}

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 780.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 450.0;

const char* kPalette[6] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                           "#d62728", "#9467bd", "#8c564b"};

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double scale(double v, double out_lo, double out_hi) const {
    return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
  }
};

Axis make_axis(double lo, double hi) {
  Axis axis;
  if (hi <= lo) {
    const double pad = std::max(1.0, std::abs(lo)) * 0.5;
    axis.lo = lo - pad;
    axis.hi = lo + pad;
    return axis;
  }
  axis.lo = lo;
  axis.hi = hi;
  return axis;
}

void emit_axes(std::string& out, const Axis& x, const Axis& y, const std::string& x_label,
               const std::string& y_label) {
  out += "<g stroke=\"#333333\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kBottom) + "\" x2=\"" +
         fmt(kRight) + "\" y2=\"" + fmt(kBottom) + "\"/>\n";
  out += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) +
         "\" y2=\"" + fmt(kBottom) + "\"/>\n";
  out += "</g>\n";

  const double xstep = nice_step(x.hi - x.lo);
  const double x0 = std::ceil(x.lo / xstep) * xstep;
  for (double t = x0; t <= x.hi + 1e-9 * xstep; t += xstep) {
    const double px = x.scale(t, kLeft, kRight);
    out += "<line stroke=\"#333333\" x1=\"" + fmt(px) + "\" y1=\"" + fmt(kBottom) +
           "\" x2=\"" + fmt(px) + "\" y2=\"" + fmt(kBottom + 5.0) + "\"/>\n";
    out += "<text text-anchor=\"middle\" font-size=\"12\" x=\"" + fmt(px) + "\" y=\"" +
           fmt(kBottom + 20.0) + "\">" + fmt(t) + "</text>\n";
  }
  const double ystep = nice_step(y.hi - y.lo);
  const double y0 = std::ceil(y.lo / ystep) * ystep;
  for (double t = y0; t <= y.hi + 1e-9 * ystep; t += ystep) {
    const double py = y.scale(t, kBottom, kTop);
    out += "<line stroke=\"#333333\" x1=\"" + fmt(kLeft - 5.0) + "\" y1=\"" + fmt(py) +
           "\" x2=\"" + fmt(kLeft) + "\" y2=\"" + fmt(py) + "\"/>\n";
    out += "<text text-anchor=\"end\" font-size=\"12\" x=\"" + fmt(kLeft - 8.0) +
           "\" y=\"" + fmt(py + 4.0) + "\">" + fmt(t) + "</text>\n";
  }
  out += "<text text-anchor=\"middle\" font-size=\"13\" x=\"" +
         fmt((kLeft + kRight) / 2.0) + "\" y=\"" + fmt(kHeight - 10.0) + "\">" + x_label +
         "</text>\n";
  out += "<text text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 15 " +
         fmt((kTop + kBottom) / 2.0) + ")\" x=\"15\" y=\"" +
         fmt((kTop + kBottom) / 2.0) + "\">" + y_label + "</text>\n";
}

std::string svg_open() {
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
                    "\" height=\"" + fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) +
                    " " + fmt(kHeight) + "\">\n";
  out += "<rect fill=\"#ffffff\" x=\"0\" y=\"0\" width=\"" + fmt(kWidth) +
         "\" height=\"" + fmt(kHeight) + "\"/>\n";
  return out;
}

// An empty series still renders: blank canvas with default [0,1] axes.
std::string empty_plot(const std::string& x_label, const std::string& y_label) {
  std::string out = svg_open();
  emit_axes(out, make_axis(0.0, 1.0), make_axis(0.0, 1.0), x_label, y_label);
  out += "</svg>\n";
  return out;
}

void emit_legend(std::string& out, const std::vector<double>& series_keys) {
  double ly = kTop + 10.0;
  for (std::size_t s = 0; s < series_keys.size(); ++s) {
    const char* color = kPalette[s % 6];
    out += "<rect fill=\"";
    out += color;
    out += "\" x=\"" + fmt(kRight - 110.0) + "\" y=\"" + fmt(ly - 9.0) +
           "\" width=\"12\" height=\"12\"/>\n";
    out += "<text font-size=\"12\" x=\"" + fmt(kRight - 92.0) + "\" y=\"" + fmt(ly + 2.0) +
           "\">M=" + fmt(series_keys[s]) + "</text>\n";
    ly += 18.0;
  }
}

std::string render_line(const Csv& csv) {
  const int cx = csv.column("c");
  const int cm = csv.column("M");
  const int cy = csv.column("mean_abs_error");
  if (csv.rows.empty()) return empty_plot("c", "mean_abs_error");

  std::map<double, std::vector<std::pair<double, double>>> series;
  double x_lo = 0.0, x_hi = 0.0, y_hi = 0.0;
  bool first = true;
  for (const auto& row : csv.rows) {
    series[row[cm]].push_back({row[cx], row[cy]});
    x_lo = first ? row[cx] : std::min(x_lo, row[cx]);
    x_hi = first ? row[cx] : std::max(x_hi, row[cx]);
    y_hi = std::max(y_hi, row[cy]);
    first = false;
  }
  const Axis x = make_axis(x_lo, x_hi);
  const Axis y = make_axis(0.0, y_hi);

  std::string out = svg_open();
  emit_axes(out, x, y, "c", "mean_abs_error");

  std::vector<double> keys;
  for (const auto& [key, points] : series) keys.push_back(key);

  int si = 0;
  for (auto& [key, points] : series) {
    std::sort(points.begin(), points.end());
    const char* color = kPalette[si % 6];
    std::string d;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d += (i == 0 ? "M" : " L");
      d += fmt(x.scale(points[i].first, kLeft, kRight)) + "," +
           fmt(y.scale(points[i].second, kBottom, kTop));
    }
    out += "<path fill=\"none\" stroke-width=\"2\" stroke=\"";
    out += color;
    out += "\" d=\"" + d + "\"/>\n";
    for (const auto& p : points) {
      out += "<circle fill=\"";
      out += color;
      out += "\" r=\"3\" cx=\"" + fmt(x.scale(p.first, kLeft, kRight)) + "\" cy=\"" +
             fmt(y.scale(p.second, kBottom, kTop)) + "\"/>\n";
    }
    ++si;
  }
  emit_legend(out, keys);
  out += "</svg>\n";
  return out;
}

std::string render_histogram(const Csv& csv) {
  const int cm = csv.column("M");
  const int cx = csv.column("r");
  const int cy = csv.column("exceed_count");
  if (csv.rows.empty()) return empty_plot("r", "exceed_count");

  std::map<double, std::vector<std::pair<double, double>>> series;
  std::vector<double> xs;
  double y_hi = 0.0;
  for (const auto& row : csv.rows) {
    series[row[cm]].push_back({row[cx], row[cy]});
    if (std::find(xs.begin(), xs.end(), row[cx]) == xs.end()) xs.push_back(row[cx]);
    y_hi = std::max(y_hi, row[cy]);
  }
  std::sort(xs.begin(), xs.end());
  const Axis y = make_axis(0.0, y_hi);

  std::string out = svg_open();

  // Categorical x: one slot per distinct radius, bars grouped by series.
  const double slot = (kRight - kLeft) / xs.size();
  const double bar = slot / (series.size() + 1.0);
  Axis x;
  x.lo = xs.front();
  x.hi = xs.back() > xs.front() ? xs.back() : xs.front() + 1.0;
  emit_axes(out, x, y, "r", "exceed_count");

  std::vector<double> keys;
  for (const auto& [key, points] : series) keys.push_back(key);

  int si = 0;
  for (const auto& [key, points] : series) {
    const char* color = kPalette[si % 6];
    for (const auto& p : points) {
      const std::size_t xi =
          std::lower_bound(xs.begin(), xs.end(), p.first) - xs.begin();
      const double x0 = kLeft + slot * xi + bar * si + bar / 2.0;
      const double py = y.scale(p.second, kBottom, kTop);
      if (p.second <= 0.0) continue;
      out += "<rect fill=\"";
      out += color;
      out += "\" x=\"" + fmt(x0) + "\" y=\"" + fmt(py) + "\" width=\"" + fmt(bar) +
             "\" height=\"" + fmt(kBottom - py) + "\"/>\n";
    }
    ++si;
  }
  emit_legend(out, keys);
  out += "</svg>\n";
  return out;
}

}  // namespace

PlotKind plot_kind_from_name(const std::string& name) {
  if (name == "line") return PlotKind::kLine;
  if (name == "histogram") return PlotKind::kHistogram;
  throw std::invalid_argument("unknown plot kind '" + name + "' (expected line|histogram)");
}

std::string render_plot_svg(const std::string& csv_text, PlotKind kind) {
  const Csv csv = parse_csv(csv_text);
  return kind == PlotKind::kLine ? render_line(csv) : render_histogram(csv);
}

}  // namespace perturbmap
