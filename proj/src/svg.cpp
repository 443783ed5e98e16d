#include "potlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace potlab {

namespace {

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

void write_svg_plot(std::ostream& os, const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  auto tx = [&](double x) { return opt.log_x ? std::log10(x) : x; };
  auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!opt.log_x || x > 0.0) && (!opt.log_y || y > 0.0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (auto [x, y] : s.points)
      if (usable(x, y)) {
        x0 = std::min(x0, tx(x));
        x1 = std::max(x1, tx(x));
        y0 = std::min(y0, ty(y));
        y1 = std::max(y1, ty(y));
      }
  if (!(x1 >= x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;

  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = opt.width - left - right, ph = opt.height - top - bottom;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\"" << opt.height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(opt.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(opt.title) << "</text>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
    const double vx = opt.log_x ? std::pow(10.0, fx) : fx, vy = opt.log_y ? std::pow(10.0, fy) : fy;
    os << "<text x=\"" << num(left + pw * k / 4.0) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">"
       << tick(vx) << "</text>\n";
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(top + ph * (1.0 - k / 4.0) + 4) << "\" text-anchor=\"end\">"
       << tick(vy) << "</text>\n";
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(opt.height - 10.0) << "\" text-anchor=\"middle\">"
     << escape(opt.x_label) << "</text>\n";
  os << "<text transform=\"translate(16," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(opt.y_label) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % (sizeof kColors / sizeof *kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (auto [x, y] : series[i].points) {
      if (!usable(x, y)) continue;
      os << (first ? "" : " ") << num(px(x)) << ',' << num(py(y));
      first = false;
    }
    os << "\"/>\n";
    os << "<text x=\"" << num(left + pw - 4) << "\" y=\"" << num(top + 16 + 14.0 * i) << "\" text-anchor=\"end\" fill=\""
       << color << "\">" << escape(series[i].name) << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace potlab
