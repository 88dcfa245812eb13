#include "barrier_mc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace barrier_mc {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 56.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_loglog_svg(std::span<const PlotPoint> points,
                              const std::string& title) {
  double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
  bool first = true;
  for (const PlotPoint& p : points) {
    if (!(p.t > 0.0) || !(p.value > 0.0)) continue;
    const double lx = std::log10(p.t);
    const double ly = std::log10(p.value);
    if (first) {
      lo_x = hi_x = lx;
      lo_y = hi_y = ly;
      first = false;
    } else {
      lo_x = std::min(lo_x, lx);
      hi_x = std::max(hi_x, lx);
      lo_y = std::min(lo_y, ly);
      hi_y = std::max(hi_y, ly);
    }
  }
  if (first) return {};
  if (hi_x - lo_x < 0.5) hi_x = lo_x + 0.5;
  if (hi_y - lo_y < 0.5) hi_y = lo_y + 0.5;
  lo_x -= 0.1;
  hi_x += 0.1;
  lo_y -= 0.2;
  hi_y += 0.2;

  const auto px = [&](double lx) {
    return kMargin + (lx - lo_x) / (hi_x - lo_x) * (kWidth - 2.0 * kMargin);
  };
  const auto py = [&](double ly) {
    return kHeight - kMargin - (ly - lo_y) / (hi_y - lo_y) * (kHeight - 2.0 * kMargin);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"monospace\" font-size=\"14\">" << title << "</text>\n";

  // axes with decade ticks
  out << "<rect x=\"" << num(kMargin) << "\" y=\"" << num(kMargin) << "\" width=\""
      << num(kWidth - 2 * kMargin) << "\" height=\"" << num(kHeight - 2 * kMargin)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(std::ceil(lo_x)); d <= static_cast<int>(std::floor(hi_x)); ++d) {
    out << "<line x1=\"" << num(px(d)) << "\" y1=\"" << num(kHeight - kMargin)
        << "\" x2=\"" << num(px(d)) << "\" y2=\"" << num(kHeight - kMargin + 6)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(px(d)) << "\" y=\"" << num(kHeight - kMargin + 20)
        << "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">1e"
        << d << "</text>\n";
  }
  for (int d = static_cast<int>(std::ceil(lo_y)); d <= static_cast<int>(std::floor(hi_y)); ++d) {
    out << "<line x1=\"" << num(kMargin - 6) << "\" y1=\"" << num(py(d))
        << "\" x2=\"" << num(kMargin) << "\" y2=\"" << num(py(d))
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(kMargin - 10) << "\" y=\"" << num(py(d) + 4)
        << "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">1e"
        << d << "</text>\n";
  }

  // slope -1 guide through the geometric mean of the points
  double cx = 0.0, cy = 0.0;
  int count = 0;
  for (const PlotPoint& p : points) {
    if (!(p.t > 0.0) || !(p.value > 0.0)) continue;
    cx += std::log10(p.t);
    cy += std::log10(p.value);
    ++count;
  }
  cx /= count;
  cy /= count;
  {
    // clip the guide segment to the frame
    const double g_lo_x = std::max(lo_x, cx - (hi_y - cy));
    const double g_hi_x = std::min(hi_x, cx - (lo_y - cy));
    if (g_lo_x < g_hi_x) {
      out << "<line x1=\"" << num(px(g_lo_x)) << "\" y1=\""
          << num(py(cy - (g_lo_x - cx))) << "\" x2=\"" << num(px(g_hi_x))
          << "\" y2=\"" << num(py(cy - (g_hi_x - cx)))
          << "\" stroke=\"#888888\" stroke-dasharray=\"6,4\"/>\n";
    }
  }

  for (const PlotPoint& p : points) {
    if (!(p.t > 0.0) || !(p.value > 0.0)) continue;
    out << "<circle cx=\"" << num(px(std::log10(p.t))) << "\" cy=\""
        << num(py(std::log10(p.value))) << "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace barrier_mc
