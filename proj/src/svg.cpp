#include "featwarp/svg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>


namespace featwarp::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Range {
  double lo, hi;
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

Range range_of(const std::vector<double>& v, bool include_zero = false) {
  double lo = v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
  double hi = v.empty() ? 1.0 : *std::max_element(v.begin(), v.end());
  if (include_zero) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  if (!(hi > lo)) {
    const double pad = std::abs(lo) > 0 ? std::abs(lo) * 0.1 : 1.0;
    lo -= pad;
    hi += pad;
  }
  return {lo, hi};
}

void open(std::ostringstream& s, const std::string& title) {
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
}

void axes(std::ostringstream& s, const Range& xr, const Range& yr, const std::string& x_label,
          const std::string& y_label, bool x_ticks = true) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  s << "<g stroke=\"black\" stroke-width=\"1\">\n"
    << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y0) << "\"/>\n"
    << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y1) << "\"/>\n"
    << "</g>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fy = yr.lo + (yr.hi - yr.lo) * k / 4.0;
    const double py = yr.map(fy, y0, y1);
    s << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << tick(fy) << "</text>\n";
    if (x_ticks) {
      const double fx = xr.lo + (xr.hi - xr.lo) * k / 4.0;
      const double px = xr.map(fx, x0, x1);
      s << "<text x=\"" << num(px) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\">" << tick(fx)
        << "</text>\n";
    }
  }
  s << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
    << escape(x_label) << "</text>\n"
    << "<text transform=\"translate(16," << num((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(y_label) << "</text>\n";
}

}  // namespace

std::string escape(const std::string& text) {
  std::string out;
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const Series& series, bool markers) {
  std::ostringstream s;
  open(s, title);
  const Range xr = range_of(series.x), yr = range_of(series.y);
  axes(s, xr, yr, x_label, y_label);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < series.x.size(); ++i)
    s << (i ? " " : "") << num(xr.map(series.x[i], x0, x1)) << ',' << num(yr.map(series.y[i], y0, y1));
  s << "\"/>\n";
  if (markers)
    for (std::size_t i = 0; i < series.x.size(); ++i)
      s << "<circle cx=\"" << num(xr.map(series.x[i], x0, x1)) << "\" cy=\"" << num(yr.map(series.y[i], y0, y1))
        << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  s << "</svg>\n";
  return s.str();
}

std::string bar_chart(const std::string& title, const std::string& value_label, const std::vector<std::string>& labels,
                      const std::vector<double>& values, const std::vector<double>& errors) {
  std::ostringstream s;
  open(s, title);
  std::vector<double> extent = values;
  for (std::size_t i = 0; i < errors.size() && i < values.size(); ++i) {
    extent.push_back(values[i] + errors[i]);
    extent.push_back(values[i] - errors[i]);
  }
  const Range xr = range_of(extent, true);
  const double left = 190, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  const double band = labels.empty() ? 1.0 : (y0 - y1) / static_cast<double>(labels.size());
  s << "<line x1=\"" << num(xr.map(0.0, left, x1)) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(xr.map(0.0, left, x1))
    << "\" y2=\"" << num(y0) << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double top = y1 + band * static_cast<double>(i) + band * 0.15;
    const double a = xr.map(std::min(0.0, values[i]), left, x1), b = xr.map(std::max(0.0, values[i]), left, x1);
    s << "<rect x=\"" << num(a) << "\" y=\"" << num(top) << "\" width=\"" << num(b - a) << "\" height=\""
      << num(band * 0.7) << "\" fill=\"#4c72b0\"/>\n"
      << "<text x=\"" << num(left - 6) << "\" y=\"" << num(top + band * 0.35 + 4) << "\" text-anchor=\"end\">"
      << escape(labels[i]) << "</text>\n";
    if (i < errors.size()) {
      const double cy = top + band * 0.35;
      s << "<line x1=\"" << num(xr.map(values[i] - errors[i], left, x1)) << "\" y1=\"" << num(cy) << "\" x2=\""
        << num(xr.map(values[i] + errors[i], left, x1)) << "\" y2=\"" << num(cy) << "\" stroke=\"black\"/>\n";
    }
  }
  for (int k = 0; k <= 4; ++k) {
    const double fx = xr.lo + (xr.hi - xr.lo) * k / 4.0;
    s << "<text x=\"" << num(xr.map(fx, left, x1)) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\">"
      << tick(fx) << "</text>\n";
  }
  s << "<text x=\"" << num((left + x1) / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
    << escape(value_label) << "</text>\n</svg>\n";
  return s.str();
}

std::string heatmap(const std::string& title, const std::string& x_label, const std::string& y_label,
                    const std::vector<double>& x, const std::vector<double>& y, const Matrix& values) {
  std::ostringstream s;
  open(s, title);
  const Range xr = range_of(x), yr = range_of(y);
  axes(s, xr, yr, x_label, y_label);
  double vmax = 0.0;
  for (double v : values.data()) vmax = std::max(vmax, std::abs(v));
  if (vmax == 0.0) vmax = 1.0;
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  // Cell i spans the midpoints around x[i] (clipped to the axis range).
  auto edges = [](const std::vector<double>& g) {
    std::vector<double> e{g.front()};
    for (std::size_t i = 1; i < g.size(); ++i) e.push_back(g[i - 1] + (g[i] - g[i - 1]) / 2);
    e.push_back(g.back());
    return e;
  };
  const auto ex = edges(x), ey = edges(y);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      const double t = values(i, j) / vmax;
      const int fade = static_cast<int>(std::lround(255.0 * (1.0 - std::abs(t))));
      char colour[16];
      if (t >= 0)
        std::snprintf(colour, sizeof colour, "#ff%02x%02x", fade, fade);
      else
        std::snprintf(colour, sizeof colour, "#%02x%02xff", fade, fade);
      const double px0 = xr.map(ex[i], x0, x1), px1 = xr.map(ex[i + 1], x0, x1);
      const double py0 = yr.map(ey[j + 1], y0, y1), py1 = yr.map(ey[j], y0, y1);
      s << "<rect x=\"" << num(px0) << "\" y=\"" << num(py0) << "\" width=\"" << num(px1 - px0) << "\" height=\""
        << num(py1 - py0) << "\" fill=\"" << colour << "\"/>\n";
    }
  s << "<text x=\"" << num(x1) << "\" y=\"" << num(kTop - 6) << "\" text-anchor=\"end\">max |value| " << tick(vmax)
    << "</text>\n</svg>\n";
  return s.str();
}

std::string scatter(const std::string& title, const std::string& x_label, const std::string& y_label,
                    const Series& points, const std::vector<std::string>& labels) {
  std::ostringstream s;
  open(s, title);
  const Range xr = range_of(points.x, true), yr = range_of(points.y, true);
  axes(s, xr, yr, x_label, y_label);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  for (std::size_t i = 0; i < points.x.size(); ++i) {
    const double px = xr.map(points.x[i], x0, x1), py = yr.map(points.y[i], y0, y1);
    s << "<line x1=\"" << num(xr.map(0, x0, x1)) << "\" y1=\"" << num(yr.map(0, y0, y1)) << "\" x2=\"" << num(px)
      << "\" y2=\"" << num(py) << "\" stroke=\"#999\"/>\n"
      << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"2.5\" fill=\"#d62728\"/>\n";
    if (i < labels.size())
      s << "<text x=\"" << num(px + 3) << "\" y=\"" << num(py - 3) << "\" font-size=\"8\">" << escape(labels[i])
        << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace featwarp::svg
