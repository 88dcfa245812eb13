#pragma once

#include <span>
#include <variant>
#include <vector>

#include "barrier_mc/rng.hpp"

namespace barrier_mc {

struct PppConfig {
  double rate_lambda = 1.0;  // arrivals per unit time, > 0
};

// Sorted Poisson arrivals on (0, horizon_t); may be empty.
struct ArrivalTimes {
  double horizon_t = 0.0;
  std::vector<double> times;
};

struct BridgeKind {
  double x0 = 0.0;
  double y_t = 0.0;
  double t = 0.0;
};

struct FreeKind {
  double x0 = 0.0;
};

// Gaussian path values aligned to a sorted time grid. Bridge samples carry
// interior times only; the endpoint values are part of the kind.
struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
  std::variant<BridgeKind, FreeKind> kind;
};

// Decoration label: a finite observation time u, or the weak-limit slot.
// The limit is a real tag, never a sentinel double.
struct DecorationLabel {
  static DecorationLabel finite(double u) { return {false, u}; }
  static DecorationLabel infinity() { return {true, 0.0}; }

  bool is_infinite = false;
  double u = 0.0;
};

enum class DecorationKind {
  zero,
  two_sided_exponential,  // symmetric exponential (Laplace) with the given rate
  limit_shifted,          // base law plus a deterministic drift decaying in u
  custom_table,           // piecewise-linear inverse cdf over (cdf, value) knots
};

// Law of the decorations Y_u and of the weak limit Y_infinity. tail_delta is
// the delta the family is tagged with: P(|Y_u| >= z) <= (1/delta) e^(-delta z)
// must hold for it (checked empirically in the test suite, not enforced here).
//
// limit_shifted draws Y_u = B + drift_scale * exp(-decay_rate * u) with B from
// the base law; its limit law is B itself when decay_rate > 0 and the fully
// shifted law when decay_rate == 0 (the drift then never decays). Negative
// decay rates are allowed for finite-horizon constructions such as
// time-reversal couplings, where no limit is ever taken.
struct DecorationFamily {
  double tail_delta = 0.5;
  DecorationKind kind = DecorationKind::zero;
  double rate = 1.0;
  bool base_is_zero = false;
  double drift_scale = 0.0;
  double decay_rate = 0.0;
  std::vector<std::pair<double, double>> table;  // custom_table knots, cdf increasing

  static DecorationFamily zero(double tail_delta);
  static DecorationFamily laplace(double rate, double tail_delta);
  static DecorationFamily shifted(DecorationFamily base, double drift_scale,
                                  double decay_rate);
  static DecorationFamily from_table(std::vector<std::pair<double, double>> knots,
                                     double tail_delta);

  // Inverse cdf of Y at the given label, evaluated at u01 in (0,1). Every
  // family maps exactly one uniform to one decoration, which is what lets
  // coupled runs swap families under common random numbers.
  double quantile(DecorationLabel label, double u01) const;

  // The assumed envelope (1/delta) e^(-delta z) at tail_delta.
  double tail_bound(double z) const;
};

// Poisson arrivals via i.i.d. exponential gaps. Count is Poisson(lambda * t).
ArrivalTimes sample_ppp(const PppConfig& cfg, double horizon_t, RngStream& rng);

// Brownian bridge from x0 at 0 to y_t at horizon_t, sampled at the given
// strictly interior sorted times by sequential conditioning: given the value
// w at s_{k-1}, the value at s_k is Gaussian with
//   mean w + (y_t - w) * dt / (t - s_{k-1}),  variance dt * (t - s_k) / (t - s_{k-1}).
// A zero-length bridge (t == 0) is allowed only when x0 == y_t and yields an
// empty path.
PathSample sample_bridge(double x0, double y_t, double horizon_t,
                         std::span<const double> times, RngStream& rng);

// Free Brownian motion from x0, sampled at sorted positive times through
// independent Gaussian increments.
PathSample sample_bm(double x0, std::span<const double> times, RngStream& rng);

// One independent decoration per label, each consuming one uniform.
std::vector<double> sample_decorations(const DecorationFamily& fam,
                                       std::span<const DecorationLabel> labels,
                                       RngStream& rng);

}  // namespace barrier_mc
