#include "barrier_mc/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "barrier_mc/errors.hpp"

namespace barrier_mc {

DecorationFamily DecorationFamily::zero(double tail_delta) {
  DecorationFamily f;
  f.tail_delta = tail_delta;
  f.kind = DecorationKind::zero;
  return f;
}

DecorationFamily DecorationFamily::laplace(double rate, double tail_delta) {
  if (!(rate > 0.0)) throw ConfigError("decorations: rate must be > 0");
  DecorationFamily f;
  f.tail_delta = tail_delta;
  f.kind = DecorationKind::two_sided_exponential;
  f.rate = rate;
  return f;
}

DecorationFamily DecorationFamily::shifted(DecorationFamily base, double drift_scale,
                                           double decay_rate) {
  if (base.kind == DecorationKind::limit_shifted) {
    throw ConfigError("decorations: shifted base must be a plain family");
  }
  DecorationFamily f = std::move(base);
  f.base_is_zero = (f.kind == DecorationKind::zero);
  f.kind = DecorationKind::limit_shifted;
  f.drift_scale = drift_scale;
  f.decay_rate = decay_rate;
  return f;
}

DecorationFamily DecorationFamily::from_table(
    std::vector<std::pair<double, double>> knots, double tail_delta) {
  if (knots.size() < 2 || knots.front().first != 0.0 || knots.back().first != 1.0) {
    throw ConfigError("decorations: table must span cdf range [0, 1]");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i].first < knots[i - 1].first || knots[i].second < knots[i - 1].second) {
      throw ConfigError("decorations: table knots must be non-decreasing");
    }
  }
  DecorationFamily f;
  f.tail_delta = tail_delta;
  f.kind = DecorationKind::custom_table;
  f.table = std::move(knots);
  return f;
}

namespace {

inline double laplace_quantile(double rate, double u) {
  // Median-symmetric inverse cdf of the two-sided exponential.
  return (u < 0.5) ? std::log(2.0 * u) / rate : -std::log(2.0 * (1.0 - u)) / rate;
}

double table_quantile(const std::vector<std::pair<double, double>>& table, double u) {
  auto it = std::upper_bound(table.begin(), table.end(), u,
                             [](double v, const auto& knot) { return v < knot.first; });
  if (it == table.begin()) return table.front().second;
  if (it == table.end()) return table.back().second;
  const auto& [c1, v1] = *it;
  const auto& [c0, v0] = *(it - 1);
  if (c1 == c0) return v0;
  return v0 + (v1 - v0) * (u - c0) / (c1 - c0);
}

}  // namespace

double DecorationFamily::quantile(DecorationLabel label, double u01) const {
  switch (kind) {
    case DecorationKind::zero:
      return 0.0;
    case DecorationKind::two_sided_exponential:
      return laplace_quantile(rate, u01);
    case DecorationKind::limit_shifted: {
      const double base = base_is_zero ? 0.0 : laplace_quantile(rate, u01);
      double drift;
      if (label.is_infinite) {
        drift = (decay_rate == 0.0) ? drift_scale : 0.0;
      } else {
        drift = drift_scale * std::exp(-decay_rate * label.u);
      }
      return base + drift;
    }
    case DecorationKind::custom_table:
      return table_quantile(table, u01);
  }
  throw ConfigError("decorations: unknown family kind");
}

double DecorationFamily::tail_bound(double z) const {
  return std::exp(-tail_delta * z) / tail_delta;
}

ArrivalTimes sample_ppp(const PppConfig& cfg, double horizon_t, RngStream& rng) {
  if (!(cfg.rate_lambda > 0.0)) throw ConfigError("ppp: rate_lambda must be > 0");
  if (horizon_t < 0.0) throw std::domain_error("sample_ppp: horizon must be >= 0");
  ArrivalTimes arrivals;
  arrivals.horizon_t = horizon_t;
  double s = rng.next_exponential(cfg.rate_lambda);
  while (s < horizon_t) {
    arrivals.times.push_back(s);
    s += rng.next_exponential(cfg.rate_lambda);
  }
  return arrivals;
}

PathSample sample_bridge(double x0, double y_t, double horizon_t,
                         std::span<const double> times, RngStream& rng) {
  if (horizon_t < 0.0) throw std::domain_error("sample_bridge: t must be >= 0");
  if (horizon_t == 0.0) {
    if (x0 != y_t) {
      throw std::domain_error("sample_bridge: zero-length bridge needs x0 == y_t");
    }
    if (!times.empty()) {
      throw std::domain_error("sample_bridge: no interior times exist at t == 0");
    }
    return {{}, {}, BridgeKind{x0, y_t, horizon_t}};
  }

  PathSample path;
  path.kind = BridgeKind{x0, y_t, horizon_t};
  path.times.assign(times.begin(), times.end());
  path.values.reserve(times.size());

  double prev_s = 0.0;
  double prev_w = x0;
  for (double s : times) {
    if (!(s > prev_s && s < horizon_t)) {
      throw std::domain_error("sample_bridge: times must be sorted inside (0, t)");
    }
    const double remaining = horizon_t - prev_s;
    const double dt = s - prev_s;
    const double mean = prev_w + (y_t - prev_w) * dt / remaining;
    const double sd = std::sqrt(dt * (horizon_t - s) / remaining);
    prev_w = mean + sd * rng.next_normal();
    prev_s = s;
    path.values.push_back(prev_w);
  }
  return path;
}

PathSample sample_bm(double x0, std::span<const double> times, RngStream& rng) {
  PathSample path;
  path.kind = FreeKind{x0};
  path.times.assign(times.begin(), times.end());
  path.values.reserve(times.size());

  double prev_s = 0.0;
  double prev_w = x0;
  for (double s : times) {
    if (!(s > prev_s)) {
      throw std::domain_error("sample_bm: times must be sorted and positive");
    }
    prev_w += std::sqrt(s - prev_s) * rng.next_normal();
    prev_s = s;
    path.values.push_back(prev_w);
  }
  return path;
}

std::vector<double> sample_decorations(const DecorationFamily& fam,
                                       std::span<const DecorationLabel> labels,
                                       RngStream& rng) {
  std::vector<double> values;
  values.reserve(labels.size());
  for (const DecorationLabel& label : labels) {
    values.push_back(fam.quantile(label, rng.next_uniform_open()));
  }
  return values;
}

}  // namespace barrier_mc
