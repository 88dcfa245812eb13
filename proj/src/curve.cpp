#include "barrier_mc/curve.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "barrier_mc/errors.hpp"

namespace barrier_mc {

namespace {

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw std::domain_error("curve: delta must lie in (0, 1/2)");
  }
}

inline double envelope_upper(double delta, double wedge_value) {
  return (1.0 + std::pow(wedge_value, 0.5 - delta)) / delta;
}

}  // namespace

CurveSpec CurveSpec::canonical(double delta, bool unit_offset) {
  require_delta(delta);
  CurveSpec c;
  c.delta = delta;
  c.kind = CurveKind::canonical_plus;
  c.unit_offset = unit_offset;
  return c;
}

CurveSpec CurveSpec::constant(double level, double delta) {
  require_delta(delta);
  CurveSpec c;
  c.delta = delta;
  c.kind = CurveKind::constant;
  c.level = level;
  return c;
}

CurveSpec CurveSpec::profile(double delta, std::function<double(double)> plus,
                             std::function<double(double)> minus) {
  require_delta(delta);
  CurveSpec c;
  c.delta = delta;
  c.kind = CurveKind::limit_profile;
  c.limit_plus = std::move(plus);
  c.limit_minus = std::move(minus);
  return c;
}

CurveSpec CurveSpec::custom(double delta, std::function<double(double, double)> fn) {
  require_delta(delta);
  CurveSpec c;
  c.delta = delta;
  c.kind = CurveKind::custom;
  c.custom_fn = std::move(fn);
  return c;
}

WedgeValue wedge(double t, double u) {
  if (!(t >= 0.0) || u < 0.0 || u > t) {
    throw std::domain_error("wedge: need 0 <= u <= t");
  }
  return {std::min(u, t - u)};
}

double eval_curve(const CurveSpec& c, double t, double u) {
  const double w = wedge(t, u).value;
  switch (c.kind) {
    case CurveKind::canonical_plus: {
      const double offset = c.unit_offset ? 1.0 : 0.0;
      return (offset + std::pow(w, 0.5 - c.delta)) / c.delta;
    }
    case CurveKind::constant:
      return c.level;
    case CurveKind::limit_profile:
      return (u <= t / 2.0) ? c.limit_plus(u) : c.limit_minus(t - u);
    case CurveKind::custom:
      return c.custom_fn(t, u);
  }
  throw ConfigError("eval_curve: unknown curve kind");
}

EnvelopeCheck validate_envelope(const CurveSpec& c, double t,
                                std::span<const double> grid) {
  for (double u : grid) {
    const double value = eval_curve(c, t, u);
    const double upper = envelope_upper(c.delta, wedge(t, u).value);
    if (value < -1.0 / c.delta || value > upper) {
      return {false, u, value};
    }
  }
  return {};
}

RegularityCheck validate_regularity(const CurveSpec& c, double t,
                                    std::span<const RegularityTriple> triples) {
  for (const RegularityTriple& tr : triples) {
    if (!(0.0 < tr.u && tr.u < tr.r && tr.r < tr.u_prime && tr.u_prime < t)) {
      throw std::domain_error("validate_regularity: need 0 < u < r < u' < t");
    }
    const double g_r = eval_curve(c, t, tr.r);

    const double lhs1 = eval_curve(c, t, tr.u) - (tr.u / tr.r) * g_r;
    const double rhs1 = envelope_upper(c.delta, wedge(tr.r, tr.u).value);
    if (lhs1 > rhs1) return {false, tr, lhs1, rhs1};

    const double lhs2 =
        eval_curve(c, t, tr.u_prime) - ((t - tr.u_prime) / (t - tr.r)) * g_r;
    const double rhs2 =
        envelope_upper(c.delta, wedge(t - tr.r, tr.u_prime - tr.r).value);
    if (lhs2 > rhs2) return {false, tr, lhs2, rhs2};
  }
  return {};
}

CurveLimits curve_limits(const CurveSpec& c, double u) {
  if (u < 0.0) throw std::domain_error("curve_limits: u must be >= 0");
  switch (c.kind) {
    case CurveKind::canonical_plus: {
      const double offset = c.unit_offset ? 1.0 : 0.0;
      const double v = (offset + std::pow(u, 0.5 - c.delta)) / c.delta;
      return {v, v};
    }
    case CurveKind::constant:
      return {c.level, c.level};
    case CurveKind::limit_profile:
      return {c.limit_plus(u), c.limit_minus(u)};
    case CurveKind::custom:
      if (!c.custom_limits) {
        throw ConfigError("curve_limits: custom curve has no declared limits");
      }
      return {c.custom_limits->first(u), c.custom_limits->second(u)};
  }
  throw ConfigError("curve_limits: unknown curve kind");
}

std::vector<double> default_envelope_grid(double t, std::size_t n) {
  std::vector<double> grid;
  grid.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    grid.push_back(t * static_cast<double>(i) / static_cast<double>(n));
  }
  return grid;
}

std::vector<RegularityTriple> default_regularity_triples(double t,
                                                         std::size_t per_axis) {
  // Lattice over the ordered region 0 < u < r < u' < t; degenerate cells
  // (coincident coordinates) are skipped.
  std::vector<RegularityTriple> triples;
  const double step = t / static_cast<double>(per_axis + 1);
  for (std::size_t i = 1; i <= per_axis; ++i) {
    for (std::size_t j = i + 1; j <= per_axis; ++j) {
      for (std::size_t k = j + 1; k <= per_axis; ++k) {
        triples.push_back({step * static_cast<double>(i),
                           step * static_cast<double>(j),
                           step * static_cast<double>(k)});
      }
    }
  }
  return triples;
}

}  // namespace barrier_mc
