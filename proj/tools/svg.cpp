#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace flcli {

namespace {

constexpr double kWidth = 860.0;
constexpr double kHeight = 560.0;
constexpr double kLeft = 72.0, kRight = 24.0, kTop = 40.0, kBottom = 56.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf"};
constexpr int kPaletteSize = 7;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double span) {
  if (!(span > 0)) return 1.0;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  double n = 10.0;
  if (r <= 1.0) {
    n = 1.0;
  } else if (r <= 2.0) {
    n = 2.0;
  } else if (r <= 5.0) {
    n = 5.0;
  }
  return n * mag;
}

}  // namespace

void write_svg_plot(std::ostream& os, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<SvgSeries>& series) {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!any) {
        xmin = xmax = x;
        ymin = ymax = y;
        any = true;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax - xmin <= 0) xmax = xmin + 1;
  if (ymax - ymin <= 0) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
        "text-anchor=\"middle\">"
     << xml_escape(title) << "</text>\n";

  // frame
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // ticks
  const double xstep = nice_step(xmax - xmin);
  for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-12 * xstep; t += xstep) {
    const double px = sx(t);
    os << "<line x1=\"" << fmt("%.2f", px) << "\" y1=\"" << fmt("%.2f", kTop + ph) << "\" x2=\""
       << fmt("%.2f", px) << "\" y2=\"" << fmt("%.2f", kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt("%.2f", px) << "\" y=\"" << fmt("%.2f", kTop + ph + 20)
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
       << fmt("%.6g", t + 0.0) << "</text>\n";
  }
  const double ystep = nice_step(ymax - ymin);
  for (double t = std::ceil(ymin / ystep) * ystep; t <= ymax + 1e-12 * ystep; t += ystep) {
    const double py = sy(t);
    os << "<line x1=\"" << fmt("%.2f", kLeft - 5) << "\" y1=\"" << fmt("%.2f", py) << "\" x2=\""
       << fmt("%.2f", kLeft) << "\" y2=\"" << fmt("%.2f", py) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt("%.2f", kLeft - 8) << "\" y=\"" << fmt("%.2f", py + 4)
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt("%.6g", t + 0.0)
       << "</text>\n";
  }

  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 14
     << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
     << xml_escape(x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << kTop + ph / 2
     << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << kTop + ph / 2 << ")\">" << xml_escape(y_label) << "</text>\n";

  // series
  for (size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % kPaletteSize];
    const auto& s = series[i];
    if (s.lines) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : s.points)
        os << fmt("%.2f", sx(x)) << ',' << fmt("%.2f", sy(y)) << ' ';
      os << "\"/>\n";
    } else {
      for (const auto& [x, y] : s.points) {
        os << "<circle cx=\"" << fmt("%.2f", sx(x)) << "\" cy=\"" << fmt("%.2f", sy(y))
           << "\" r=\"1.8\" fill=\"" << color << "\"/>\n";
      }
    }
  }

  // legend
  double ly = kTop + 14;
  for (size_t i = 0; i < series.size(); ++i) {
    if (series[i].label.empty()) continue;
    const char* color = kPalette[i % kPaletteSize];
    os << "<rect x=\"" << kLeft + pw - 150 << "\" y=\"" << ly - 9
       << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << kLeft + pw - 135 << "\" y=\"" << ly
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(series[i].label)
       << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
}

}  // namespace flcli
