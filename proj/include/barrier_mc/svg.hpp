#pragma once

#include <span>
#include <string>

namespace barrier_mc {

struct PlotPoint {
  double t = 0.0;
  double value = 0.0;
};

// Log-log scatter of (t, value) with a slope -1 guide line, the signature of
// the 1/t survival law. Output is a self-contained SVG and a pure function of
// the points, so regenerating it from the same CSV reproduces it byte for
// byte.
std::string render_loglog_svg(std::span<const PlotPoint> points,
                              const std::string& title);

}  // namespace barrier_mc
