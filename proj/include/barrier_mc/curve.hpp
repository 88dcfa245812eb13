#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace barrier_mc {

// Barrier families gamma_{t,u}. Every family carries the growth parameter
// delta in (0, 1/2): it fixes both the envelope the curve must respect,
//     -1/delta <= gamma_{t,u} <= (1/delta)(1 + wedge(t,u)^(1/2-delta)),
// and the exponent of the canonical curve itself.
enum class CurveKind { canonical_plus, constant, limit_profile, custom };

struct CurveSpec {
  double delta = 0.25;
  CurveKind kind = CurveKind::canonical_plus;

  // canonical_plus: (1/delta)(1 + w^(1/2-delta)); dropping the unit offset
  // gives the bare (1/delta) w^(1/2-delta) variant used for the
  // continuous-motion scaling checks.
  bool unit_offset = true;

  double level = 0.0;  // constant

  // limit_profile: gamma_{t,u} = plus(u) for u <= t/2, minus(t-u) beyond,
  // so that the two t->infinity limits are plus(u) and minus(u) exactly.
  std::function<double(double)> limit_plus;
  std::function<double(double)> limit_minus;

  // custom: arbitrary (t, u) -> gamma table/function; limits must be
  // declared explicitly to be usable in asymptotic experiments.
  std::function<double(double, double)> custom_fn;
  std::optional<std::pair<std::function<double(double)>,
                          std::function<double(double)>>> custom_limits;

  static CurveSpec canonical(double delta, bool unit_offset = true);
  static CurveSpec constant(double level, double delta);
  static CurveSpec profile(double delta, std::function<double(double)> plus,
                           std::function<double(double)> minus);
  static CurveSpec custom(double delta, std::function<double(double, double)> fn);
};

struct WedgeValue {
  double value = 0.0;
};

// wedge(t, u) = min(u, t-u), the distance of u to the nearer end of [0, t].
WedgeValue wedge(double t, double u);

double eval_curve(const CurveSpec& c, double t, double u);

struct EnvelopeCheck {
  bool ok = true;
  double u = 0.0;      // first violating grid point when !ok
  double value = 0.0;  // curve value there
};

// Checks the two-sided envelope at every grid point; reports the first
// violation. Grid checking (not symbolic) is the only generic option for
// custom curves; the default grid has 1000 points.
EnvelopeCheck validate_envelope(const CurveSpec& c, double t,
                                std::span<const double> grid);

struct RegularityTriple {
  double u = 0.0;
  double r = 0.0;
  double u_prime = 0.0;
};

struct RegularityCheck {
  bool ok = true;
  RegularityTriple at;
  double lhs = 0.0;
  double rhs = 0.0;
};

// The sharpened two-part condition needed by the repulsion estimate: the
// curve rescaled along the chord through (r, gamma_{t,r}) must stay inside
// the envelope of the corresponding sub-interval, on both sides of r.
RegularityCheck validate_regularity(const CurveSpec& c, double t,
                                    std::span<const RegularityTriple> triples);

struct CurveLimits {
  double gamma_inf_plus = 0.0;   // lim_t gamma_{t,u}
  double gamma_inf_minus = 0.0;  // lim_t gamma_{t,t-u}
};

CurveLimits curve_limits(const CurveSpec& c, double u);

std::vector<double> default_envelope_grid(double t, std::size_t n = 1000);
std::vector<RegularityTriple> default_regularity_triples(double t,
                                                         std::size_t per_axis = 50);

}  // namespace barrier_mc
