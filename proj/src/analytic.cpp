#include "barrier_mc/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace barrier_mc {

namespace {
inline double neg_part(double v) { return v < 0.0 ? -v : 0.0; }
}  // namespace

double exp_clamped(double exponent) {
  if (exponent < -745.0) return 0.0;
  return std::exp(exponent);
}

double ballot_survival(const BridgeEndpoints& e) {
  if (e.x0 > 0.0 || e.y_t > 0.0) return 0.0;
  const double z = 2.0 * neg_part(e.x0) * neg_part(e.y_t) / e.t;
  return -std::expm1(-z);
}

double bridge_max_tail(double z, double s) {
  if (z < 0.0) throw std::domain_error("bridge_max_tail: z must be >= 0");
  if (!(s > 0.0)) throw std::domain_error("bridge_max_tail: s must be > 0");
  return exp_clamped(-2.0 * z * z / s);
}

double segment_crossing_prob(double w0, double w1, double b0, double b1, double h) {
  if (!(h > 0.0)) throw std::domain_error("segment_crossing_prob: h must be > 0");
  if (w0 >= b0 || w1 >= b1) return 1.0;
  return exp_clamped(-2.0 * (b0 - w0) * (b1 - w1) / h);
}

GaussianMoments bridge_marginal(const BridgeEndpoints& e, double r) {
  if (!(r > 0.0 && r < e.t)) {
    throw std::domain_error("bridge_marginal: r must lie in (0, t)");
  }
  return {(e.x0 * (e.t - r) + e.y_t * r) / e.t, r * (e.t - r) / e.t};
}

}  // namespace barrier_mc
