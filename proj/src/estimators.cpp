#include "barrier_mc/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <thread>

#include "barrier_mc/errors.hpp"
#include "barrier_mc/rng.hpp"

namespace barrier_mc {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::PASS: return "PASS";
    case Verdict::FAIL: return "FAIL";
    case Verdict::INCONCLUSIVE: return "INCONCLUSIVE";
    case Verdict::NA: return "N/A";
  }
  return "N/A";
}

namespace {

inline double neg_part(double v) { return v < 0.0 ? -v : 0.0; }
inline double pos_part(double v) { return v > 0.0 ? v : 0.0; }

struct MeanAcc {
  double sum = 0.0;
  double sumsq = 0.0;
  std::int64_t n = 0;

  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++n;
  }
  void merge(const MeanAcc& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    n += o.n;
  }
  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }
  double variance() const {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    return std::max(0.0, (sumsq - sum * sum / nn) / (nn - 1.0));
  }
  double std_error() const {
    return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

int resolve_workers(int requested, std::int64_t n) {
  int w = requested;
  if (w <= 0) {
    w = static_cast<int>(std::thread::hardware_concurrency());
    if (w <= 0) w = 1;
  }
  if (static_cast<std::int64_t>(w) > n) w = static_cast<int>(std::max<std::int64_t>(n, 1));
  return w;
}

// Runs `body(state, replica_index)` over replica indices [0, n), split into
// `workers` contiguous blocks. States are merged in worker order, so the
// result depends on (n, workers) but never on thread scheduling.
template <class State, class Body>
State run_replicas(std::int64_t n, int workers, const Body& body) {
  std::vector<State> states(static_cast<std::size_t>(workers));
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = n * w / workers;
    const std::int64_t hi = n * (w + 1) / workers;
    threads.emplace_back([&body, &states, w, lo, hi]() {
      State& state = states[static_cast<std::size_t>(w)];
      for (std::int64_t i = lo; i < hi; ++i) body(state, i);
    });
  }
  for (auto& th : threads) th.join();
  for (int w = 1; w < workers; ++w) states[0].merge(states[static_cast<std::size_t>(w)]);
  return std::move(states[0]);
}

class WallTimer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Estimate make_estimate(const MeanAcc& acc, std::uint64_t seed, int workers,
                       double wall_s) {
  return {acc.mean(), acc.std_error(), acc.n, seed, workers, wall_s};
}

void require_envelope(const BarrierExperiment& exp, double t) {
  const auto grid = default_envelope_grid(t);
  const EnvelopeCheck check = validate_envelope(exp.curve, t, grid);
  if (!check.ok) {
    throw ConfigError("experiment curve fails its envelope at u=" +
                      std::to_string(check.u) + " (value " +
                      std::to_string(check.value) + ")");
  }
}

std::vector<DecorationLabel> arrival_labels(const ArrivalTimes& arrivals, FgEnd side) {
  std::vector<DecorationLabel> labels;
  labels.reserve(arrivals.times.size());
  for (double s : arrivals.times) {
    labels.push_back(side == FgEnd::start ? DecorationLabel::finite(s)
                                          : DecorationLabel::infinity());
  }
  return labels;
}

// Ratio-of-means with delta-method variance, for paired indicator sums.
struct RatioAcc {
  double sum_num = 0.0;   // numerator indicators (numerator event implies denominator)
  double sum_den = 0.0;
  double sum_nd = 0.0;    // sum of num*den products
  double sum_numsq = 0.0;
  double sum_densq = 0.0;
  std::int64_t n = 0;

  void add(double num, double den) {
    sum_num += num;
    sum_den += den;
    sum_nd += num * den;
    sum_numsq += num * num;
    sum_densq += den * den;
    ++n;
  }
  void merge(const RatioAcc& o) {
    sum_num += o.sum_num;
    sum_den += o.sum_den;
    sum_nd += o.sum_nd;
    sum_numsq += o.sum_numsq;
    sum_densq += o.sum_densq;
    n += o.n;
  }

  double ratio() const { return sum_den > 0.0 ? sum_num / sum_den : 0.0; }

  double ratio_se() const {
    if (n < 2 || sum_den <= 0.0) return 0.0;
    const double nn = static_cast<double>(n);
    const double dbar = sum_den / nn;
    const double r = ratio();
    const double s_nn = (sum_numsq - sum_num * sum_num / nn) / (nn - 1.0);
    const double s_nd = (sum_nd - sum_num * sum_den / nn) / (nn - 1.0);
    const double s_dd = (sum_densq - sum_den * sum_den / nn) / (nn - 1.0);
    const double var = (s_nn - 2.0 * r * s_nd + r * r * s_dd) / (nn * dbar * dbar);
    return std::sqrt(std::max(0.0, var));
  }

  double den_mean() const { return n > 0 ? sum_den / static_cast<double>(n) : 0.0; }
  double den_se() const {
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    const double var =
        std::max(0.0, (sum_densq - sum_den * sum_den / nn) / (nn - 1.0));
    return std::sqrt(var / nn);
  }
};

}  // namespace

bool RangeRegion::contains(double x, double y, double t) const {
  if (x > 1.0 / epsilon || y > 1.0 / epsilon) return false;
  return (neg_part(x) + 1.0) * (neg_part(y) + 1.0) <= std::pow(t, 1.0 - epsilon);
}

bool indicator_Q(const PathSample& path, const CurveSpec& curve,
                 std::span<const double> decorations, double window_lo,
                 double window_hi) {
  if (path.times.size() != decorations.size()) {
    throw std::domain_error("indicator_Q: decorations must align with arrivals");
  }
  const BridgeKind* bridge = std::get_if<BridgeKind>(&path.kind);
  if (bridge == nullptr) {
    throw std::domain_error("indicator_Q: path must be a bridge sample");
  }
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    const double u = path.times[k];
    if (u < window_lo || u > window_hi) continue;
    if (path.values[k] > eval_curve(curve, bridge->t, u) + decorations[k]) {
      return false;
    }
  }
  return true;
}

bool indicator_Q_limit(const PathSample& path, const CurveSpec& curve, FgEnd side,
                       std::span<const double> decorations, double window_lo,
                       double window_hi) {
  if (path.times.size() != decorations.size()) {
    throw std::domain_error("indicator_Q_limit: decorations must align with arrivals");
  }
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    const double u = path.times[k];
    if (u < window_lo || u > window_hi) continue;
    const CurveLimits lim = curve_limits(curve, u);
    const double gamma = (side == FgEnd::start) ? lim.gamma_inf_plus : lim.gamma_inf_minus;
    if (path.values[k] > gamma + decorations[k]) return false;
  }
  return true;
}

Estimate estimate_survival(const BarrierExperiment& exp, std::int64_t n,
                           int workers, std::uint64_t master_seed) {
  if (n < 1000) throw std::domain_error("estimate_survival: n must be >= 1000");
  require_envelope(exp, exp.endpoints.t);

  const int w = resolve_workers(workers, n);
  WallTimer timer;
  const auto acc = run_replicas<MeanAcc>(n, w, [&](MeanAcc& state, std::int64_t idx) {
    RngStream rng(master_seed, static_cast<std::uint64_t>(idx));
    const ArrivalTimes arrivals = sample_ppp(exp.ppp, exp.endpoints.t, rng);
    const PathSample path = sample_bridge(exp.endpoints.x0, exp.endpoints.y_t,
                                          exp.endpoints.t, arrivals.times, rng);
    const auto labels = arrival_labels(arrivals, FgEnd::start);
    const auto decos = sample_decorations(exp.decorations, labels, rng);
    state.add(indicator_Q(path, exp.curve, decos, 0.0, exp.endpoints.t) ? 1.0 : 0.0);
  });
  return make_estimate(acc, master_seed, w, timer.seconds());
}

Estimate estimate_fg(const FgSide& cfg, const BarrierExperiment& exp, std::int64_t n,
                     int workers, std::uint64_t master_seed) {
  if (!(cfg.s_horizon > 0.0)) throw std::domain_error("estimate_fg: s must be > 0");
  if (n < 1000) throw std::domain_error("estimate_fg: n must be >= 1000");
  curve_limits(exp.curve, 0.0);  // fails fast for curves without declared limits
  if (cfg.side == FgEnd::end && exp.decorations.kind == DecorationKind::limit_shifted &&
      exp.decorations.decay_rate < 0.0) {
    throw ConfigError("estimate_fg: decoration family has no weak limit");
  }

  const int w = resolve_workers(workers, n);
  WallTimer timer;
  const auto acc = run_replicas<MeanAcc>(n, w, [&](MeanAcc& state, std::int64_t idx) {
    RngStream rng(master_seed, static_cast<std::uint64_t>(idx));
    const ArrivalTimes arrivals = sample_ppp(exp.ppp, cfg.s_horizon, rng);
    std::vector<double> times = arrivals.times;
    times.push_back(cfg.s_horizon);
    const PathSample path = sample_bm(cfg.x_start, times, rng);
    const auto labels = arrival_labels(arrivals, cfg.side);
    const auto decos = sample_decorations(exp.decorations, labels, rng);

    bool survived = true;
    for (std::size_t k = 0; k < arrivals.times.size(); ++k) {
      const CurveLimits lim = curve_limits(exp.curve, arrivals.times[k]);
      const double gamma =
          (cfg.side == FgEnd::start) ? lim.gamma_inf_plus : lim.gamma_inf_minus;
      if (path.values[k] > gamma + decos[k]) {
        survived = false;
        break;
      }
    }
    state.add(survived ? neg_part(path.values.back()) : 0.0);
  });
  return make_estimate(acc, master_seed, w, timer.seconds());
}

TrendFit fit_trend(std::span<const double> x, std::span<const double> y,
                   std::span<const double> se) {
  if (x.size() != y.size() || x.size() != se.size() || x.size() < 3) {
    throw std::domain_error("fit_trend: need >= 3 aligned points");
  }
  const std::size_t m = x.size();
  double xbar = 0.0;
  for (double xi : x) xbar += xi;
  xbar /= static_cast<double>(m);
  double sxx = 0.0;
  for (double xi : x) sxx += (xi - xbar) * (xi - xbar);
  double slope = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double a = (x[i] - xbar) / sxx;
    slope += a * y[i];
    var += a * a * se[i] * se[i];
  }
  return {slope, std::sqrt(var), m};
}

AsymptoticReport check_asymptotic(const BarrierExperiment& base, double x, double y,
                                  std::span<const double> t_grid, double s,
                                  std::int64_t n, int workers, std::uint64_t seed,
                                  double tol, double epsilon) {
  const RangeRegion region{epsilon};
  for (double t : t_grid) {
    if (!region.contains(x, y, t)) {
      throw ConfigError("check_asymptotic: (x,y,t)=(" + std::to_string(x) + "," +
                        std::to_string(y) + "," + std::to_string(t) +
                        ") lies outside R_epsilon(t) with epsilon=" +
                        std::to_string(epsilon));
    }
  }

  AsymptoticReport report;
  report.s_horizon = s;
  report.tol = tol;
  report.f = estimate_fg({FgEnd::start, s, x}, base, n, workers, derive_seed(seed, 1));
  report.g = estimate_fg({FgEnd::end, s, y}, base, n, workers, derive_seed(seed, 2));

  const double fg = report.f.value * report.g.value;
  double rel_fg = 0.0;
  if (fg > 0.0) {
    rel_fg = (report.f.std_error / report.f.value) * (report.f.std_error / report.f.value) +
             (report.g.std_error / report.g.value) * (report.g.std_error / report.g.value);
  }

  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    BarrierExperiment exp = base;
    exp.endpoints = {x, y, t_grid[i]};
    AsymptoticRow row;
    row.t = t_grid[i];
    row.p = estimate_survival(exp, n, workers, derive_seed(seed, 16 + i));
    row.scaled = row.t * row.p.value;
    if (fg > 0.0 && row.p.value > 0.0) {
      row.ratio = row.scaled / (2.0 * fg);
      const double rel_p = row.p.std_error / row.p.value;
      row.ratio_se = row.ratio * std::sqrt(rel_p * rel_p + rel_fg);
    }
    report.rows.push_back(row);
  }

  AsymptoticRow& last = report.rows.back();
  if (last.ratio <= 0.0 || 3.0 * last.ratio_se > tol) {
    report.verdict = Verdict::INCONCLUSIVE;
  } else if (std::fabs(last.ratio - 1.0) <= tol + 3.0 * last.ratio_se) {
    report.verdict = Verdict::PASS;
  } else {
    report.verdict = Verdict::FAIL;
  }
  last.verdict = report.verdict;
  return report;
}

BoundScanReport scan_bound_constant(const BarrierExperiment& base,
                                    const RangeRegion& region,
                                    std::span<const double> x_list,
                                    std::span<const double> y_list,
                                    std::span<const double> t_list, std::int64_t n,
                                    int workers, std::uint64_t seed) {
  for (double x : x_list) {
    for (double y : y_list) {
      for (double t : t_list) {
        if (!region.contains(x, y, t)) {
          throw ConfigError("scan_bound_constant: cell (" + std::to_string(x) + "," +
                            std::to_string(y) + "," + std::to_string(t) +
                            ") lies outside R_epsilon(t)");
        }
      }
    }
  }

  BoundScanReport report;
  const double lambda = base.ppp.rate_lambda;
  const double delta = base.curve.delta;
  std::uint64_t cell_tag = 0;
  for (double x : x_list) {
    for (double y : y_list) {
      for (double t : t_list) {
        BarrierExperiment exp = base;
        exp.endpoints = {x, y, t};
        BoundScanCell cell;
        cell.x = x;
        cell.y = y;
        cell.t = t;
        cell.p = estimate_survival(exp, n, workers, derive_seed(seed, 100 + cell_tag++));
        const double denom = (neg_part(x) + 1.0) * (neg_part(y) + 1.0);
        cell.ratio = t * cell.p.value / denom;
        cell.ratio_se = t * cell.p.std_error / denom;
        if (x * y <= 0.0) {
          cell.mixed_sign = true;
          const double decay = std::sqrt(2.0 * lambda) * (1.0 - delta);
          const double norm = (neg_part(x) + exp_clamped(-decay * pos_part(x))) *
                              (neg_part(y) + exp_clamped(-decay * pos_part(y))) *
                              std::exp((y - x) * (y - x) / (2.0 * t)) / t;
          cell.mixed_ratio = cell.p.value / norm;
          cell.mixed_ratio_se = cell.p.std_error / norm;
        }
        report.cells.push_back(cell);
      }
    }
  }

  for (const BoundScanCell& cell : report.cells) {
    if (cell.ratio > report.c_hat) {
      report.c_hat = cell.ratio;
      report.c_hat_se = cell.ratio_se;
    }
  }

  if (t_list.size() >= 3) {
    for (double x : x_list) {
      for (double y : y_list) {
        std::vector<double> log_t, ratios, ses;
        for (const BoundScanCell& cell : report.cells) {
          if (cell.x == x && cell.y == y) {
            log_t.push_back(std::log(cell.t));
            ratios.push_back(cell.ratio);
            ses.push_back(cell.ratio_se);
          }
        }
        report.series.push_back({x, y, fit_trend(log_t, ratios, ses)});
      }
    }
    bool all_ok = true;
    for (const BoundScanSeries& s : report.series) {
      if (s.trend.slope > 3.0 * s.trend.se) all_ok = false;
    }
    report.verdict = all_ok ? Verdict::PASS : Verdict::FAIL;
  }
  return report;
}

namespace {

// Time grid for the repulsion window [s, t-s]: equal subdivisions with step
// at most rc.grid_step, endpoints landing on s and t-s exactly. Degenerates
// to the single midpoint when s == t/2.
std::vector<double> repulsion_grid(double t, double s, double step) {
  const double width = t - 2.0 * s;
  std::vector<double> grid;
  if (width <= 0.0) {
    grid.push_back(s);
    return grid;
  }
  const auto segments = static_cast<std::size_t>(std::ceil(width / step - 1e-12));
  grid.reserve(segments + 1);
  for (std::size_t i = 0; i <= segments; ++i) {
    grid.push_back(s + width * static_cast<double>(i) / static_cast<double>(segments));
  }
  return grid;
}

struct MergedPoint {
  double time = 0.0;
  bool is_arrival = false;
  int grid_index = -1;
};

// Sorted union of arrivals and grid points; exact ties collapse into a
// single point carrying both roles.
void merge_times(const std::vector<double>& arrivals, const std::vector<double>& grid,
                 std::vector<MergedPoint>& out) {
  out.clear();
  out.reserve(arrivals.size() + grid.size());
  std::size_t a = 0;
  std::size_t g = 0;
  while (a < arrivals.size() || g < grid.size()) {
    if (g == grid.size() || (a < arrivals.size() && arrivals[a] < grid[g])) {
      out.push_back({arrivals[a++], true, -1});
    } else if (a == arrivals.size() || grid[g] < arrivals[a]) {
      out.push_back({grid[g], false, static_cast<int>(g)});
      ++g;
    } else {
      out.push_back({arrivals[a++], true, static_cast<int>(g)});
      ++g;
    }
  }
}

void validate_repulsion_inputs(const BarrierExperiment& exp, const RepulsionConfig& rc) {
  const double t = exp.endpoints.t;
  if (!(rc.s_inner > 2.0 && rc.s_inner <= t / 2.0)) {
    throw std::domain_error("repulsion: s must lie in (2, t/2]");
  }
  if (!(rc.M >= 1.0)) throw std::domain_error("repulsion: M must be >= 1");
  if (!(rc.grid_step > 0.0 && rc.grid_step <= 1.0)) {
    throw std::domain_error("repulsion: grid_step must lie in (0, 1]");
  }
  require_envelope(exp, t);
  const auto triples = default_regularity_triples(t);
  const RegularityCheck reg = validate_regularity(exp.curve, t, triples);
  if (!reg.ok) {
    throw ConfigError("repulsion: curve fails the regularity condition at (u,r,u')=(" +
                      std::to_string(reg.at.u) + "," + std::to_string(reg.at.r) + "," +
                      std::to_string(reg.at.u_prime) + ")");
  }
}

// Evaluates the excursion event "max over [s, t-s] of W - gamma >= -M" on a
// sampled path: discrete maximum over the in-window points visible to the
// given grid level, then one crossing-probability Bernoulli per in-window
// segment. Draws exactly one uniform per surviving segment, stopping at the
// first flagged crossing.
bool excursion_event(const std::vector<MergedPoint>& points,
                     const std::vector<double>& values, const CurveSpec& curve,
                     double t, double window_lo, double window_hi, double M,
                     bool coarse_only, RngStream& rng) {
  const auto visible = [&](const MergedPoint& p) {
    if (p.time < window_lo || p.time > window_hi) return false;
    if (!coarse_only) return true;
    return p.is_arrival || (p.grid_index >= 0 && p.grid_index % 2 == 0);
  };

  int prev = -1;
  double prev_gap = 0.0;  // barrier minus path at the previous visible point
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!visible(points[i])) continue;
    const double barrier = eval_curve(curve, t, points[i].time) - M;
    const double gap = barrier - values[i];
    if (gap <= 0.0) return true;  // at or above gamma - M
    if (prev >= 0) {
      const double h = points[i].time - points[static_cast<std::size_t>(prev)].time;
      const double q = exp_clamped(-2.0 * prev_gap * gap / h);
      if (rng.next_uniform() < q) return true;
    }
    prev = static_cast<int>(i);
    prev_gap = gap;
  }
  return false;
}

struct RepulsionState {
  RatioAcc acc;
  std::vector<MergedPoint> merged;
  std::vector<double> times;

  void merge(const RepulsionState& o) { acc.merge(o.acc); }
};

}  // namespace

RepulsionResult estimate_repulsion(const BarrierExperiment& exp,
                                   const RepulsionConfig& rc, std::int64_t n,
                                   int workers, std::uint64_t seed) {
  validate_repulsion_inputs(exp, rc);
  const double t = exp.endpoints.t;
  const double window_hi = t - rc.s_inner;
  const std::vector<double> grid = repulsion_grid(t, rc.s_inner, rc.grid_step);

  const int w = resolve_workers(workers, n);
  WallTimer timer;
  auto state = run_replicas<RepulsionState>(n, w, [&](RepulsionState& st, std::int64_t idx) {
    RngStream rng(seed, static_cast<std::uint64_t>(idx));
    const ArrivalTimes arrivals = sample_ppp(exp.ppp, t, rng);
    merge_times(arrivals.times, grid, st.merged);
    st.times.clear();
    for (const MergedPoint& p : st.merged) st.times.push_back(p.time);
    const PathSample path =
        sample_bridge(exp.endpoints.x0, exp.endpoints.y_t, t, st.times, rng);

    const auto labels = arrival_labels(arrivals, FgEnd::start);
    const auto decos = sample_decorations(exp.decorations, labels, rng);
    bool survived = true;
    std::size_t arrival_k = 0;
    for (std::size_t i = 0; i < st.merged.size(); ++i) {
      if (!st.merged[i].is_arrival) continue;
      const double gamma = eval_curve(exp.curve, t, st.merged[i].time);
      if (path.values[i] > gamma + decos[arrival_k]) survived = false;
      ++arrival_k;
    }

    double num = 0.0;
    if (survived) {
      const bool near = excursion_event(st.merged, path.values, exp.curve, t,
                                        rc.s_inner, window_hi, rc.M,
                                        /*coarse_only=*/false, rng);
      num = near ? 1.0 : 0.0;
    }
    st.acc.add(num, survived ? 1.0 : 0.0);
  });

  RepulsionResult result;
  result.conditional = {state.acc.ratio(), state.acc.ratio_se(), state.acc.n,
                        seed, w, timer.seconds()};
  result.p_joint = state.acc.sum_num / static_cast<double>(state.acc.n);
  {
    MeanAcc joint;
    joint.sum = state.acc.sum_num;
    joint.sumsq = state.acc.sum_numsq;
    joint.n = state.acc.n;
    result.p_joint_se = joint.std_error();
  }
  result.p_surv = state.acc.den_mean();
  result.p_surv_se = state.acc.den_se();
  result.verdict = (result.p_surv <= 3.0 * result.p_surv_se) ? Verdict::INCONCLUSIVE
                                                             : Verdict::NA;
  return result;
}

RefinementCheck repulsion_refinement_check(const BarrierExperiment& exp,
                                           const RepulsionConfig& rc, std::int64_t n,
                                           int workers, std::uint64_t seed) {
  validate_repulsion_inputs(exp, rc);
  const double t = exp.endpoints.t;
  const double window_hi = t - rc.s_inner;
  // Doubling the segment count of the coarse grid makes the coarse points
  // exactly the even-indexed fine ones.
  std::vector<double> coarse = repulsion_grid(t, rc.s_inner, rc.grid_step);
  std::vector<double> fine;
  if (coarse.size() == 1) {
    fine = coarse;
  } else {
    const double width = t - 2.0 * rc.s_inner;
    const std::size_t segments = 2 * (coarse.size() - 1);
    for (std::size_t i = 0; i <= segments; ++i) {
      fine.push_back(rc.s_inner +
                     width * static_cast<double>(i) / static_cast<double>(segments));
    }
  }

  struct State {
    RatioAcc coarse_acc;  // reused for paired bookkeeping below
    double sum_nc = 0.0, sum_nf = 0.0, sum_ncnf = 0.0, sum_d = 0.0;
    std::int64_t n = 0;
    std::vector<MergedPoint> merged;
    std::vector<double> times;
    void merge(const State& o) {
      coarse_acc.merge(o.coarse_acc);
      sum_nc += o.sum_nc;
      sum_nf += o.sum_nf;
      sum_ncnf += o.sum_ncnf;
      sum_d += o.sum_d;
      n += o.n;
    }
  };

  const int w = resolve_workers(workers, n);
  auto state = run_replicas<State>(n, w, [&](State& st, std::int64_t idx) {
    RngStream rng(seed, static_cast<std::uint64_t>(idx));
    const ArrivalTimes arrivals = sample_ppp(exp.ppp, t, rng);
    merge_times(arrivals.times, fine, st.merged);
    st.times.clear();
    for (const MergedPoint& p : st.merged) st.times.push_back(p.time);
    const PathSample path =
        sample_bridge(exp.endpoints.x0, exp.endpoints.y_t, t, st.times, rng);

    const auto labels = arrival_labels(arrivals, FgEnd::start);
    const auto decos = sample_decorations(exp.decorations, labels, rng);
    bool survived = true;
    std::size_t arrival_k = 0;
    for (std::size_t i = 0; i < st.merged.size(); ++i) {
      if (!st.merged[i].is_arrival) continue;
      if (path.values[i] > eval_curve(exp.curve, t, st.merged[i].time) + decos[arrival_k]) {
        survived = false;
      }
      ++arrival_k;
    }

    double nf = 0.0;
    double nc = 0.0;
    if (survived) {
      // Both resolutions decide the same physical excursion, so each coarse
      // segment consumes a single uniform shared by the coarse decision
      // (endpoint crossing probability) and the fine one (midpoint checks
      // plus the combined sub-segment crossing probability). Marginals stay
      // exact; the coupling only removes coin-flip noise from the paired
      // difference.
      bool coarse_hit = false;
      bool fine_hit = false;
      const auto in_window = [&](const MergedPoint& p) {
        return p.time >= rc.s_inner && p.time <= window_hi;
      };
      const auto coarse_visible = [&](const MergedPoint& p) {
        return p.is_arrival || (p.grid_index >= 0 && p.grid_index % 2 == 0);
      };
      int prev = -1;
      double prev_gap = 0.0;
      double q_fine_miss = 1.0;   // prob. no fine crossing since the last coarse point
      bool fine_touch = false;    // interior fine point at/above the barrier
      double fine_prev_gap = 0.0;
      int fine_prev = -1;
      for (std::size_t i = 0; i < st.merged.size(); ++i) {
        if (!in_window(st.merged[i])) continue;
        const double gap =
            eval_curve(exp.curve, t, st.merged[i].time) - rc.M - path.values[i];
        if (fine_prev >= 0) {
          const double h =
              st.merged[i].time - st.merged[static_cast<std::size_t>(fine_prev)].time;
          q_fine_miss *= 1.0 - exp_clamped(-2.0 * fine_prev_gap * gap / h);
        }
        fine_prev = static_cast<int>(i);
        fine_prev_gap = gap;
        if (!coarse_visible(st.merged[i])) {
          if (gap <= 0.0) fine_touch = true;
          continue;
        }
        if (gap <= 0.0) {
          coarse_hit = true;
          fine_hit = true;
          break;
        }
        if (prev >= 0) {
          const double h =
              st.merged[i].time - st.merged[static_cast<std::size_t>(prev)].time;
          const double q_coarse = exp_clamped(-2.0 * prev_gap * gap / h);
          const double q_fine = fine_touch ? 1.0 : 1.0 - q_fine_miss;
          const double u = rng.next_uniform();
          if (u < q_coarse) coarse_hit = true;
          if (u < q_fine) fine_hit = true;
          if (coarse_hit && fine_hit) break;
        }
        prev = static_cast<int>(i);
        prev_gap = gap;
        q_fine_miss = 1.0;
        fine_touch = false;
      }
      nc = coarse_hit ? 1.0 : 0.0;
      nf = fine_hit ? 1.0 : 0.0;
    }
    const double d = survived ? 1.0 : 0.0;
    st.coarse_acc.add(nc, d);
    st.sum_nc += nc;
    st.sum_nf += nf;
    st.sum_ncnf += nc * nf;
    st.sum_d += d;
    st.n += 1;
  });

  RefinementCheck check;
  check.coarse = state.coarse_acc.ratio();
  check.coarse_se = state.coarse_acc.ratio_se();
  check.fine = state.sum_d > 0.0 ? state.sum_nf / state.sum_d : 0.0;
  check.diff = check.coarse - check.fine;

  // Delta method on the paired difference (Nc - Nf)/D.
  if (state.n >= 2 && state.sum_d > 0.0) {
    const double nn = static_cast<double>(state.n);
    const double dbar = state.sum_d / nn;
    const double rd = check.diff;
    const double sum_dn = state.sum_nc - state.sum_nf;  // sum of (Nc - Nf), and of (Nc - Nf)*D
    const double sum_dnsq = state.sum_nc + state.sum_nf - 2.0 * state.sum_ncnf;
    const double s_nn = (sum_dnsq - sum_dn * sum_dn / nn) / (nn - 1.0);
    const double s_nd = (sum_dn - sum_dn * state.sum_d / nn) / (nn - 1.0);
    const double s_dd =
        (state.sum_d - state.sum_d * state.sum_d / nn) / (nn - 1.0);
    const double var = (s_nn - 2.0 * rd * s_nd + rd * rd * s_dd) / (nn * dbar * dbar);
    check.diff_se = std::sqrt(std::max(0.0, var));
  }
  check.within_one_se = std::fabs(check.diff) < check.coarse_se;
  return check;
}

namespace {

bool same_end_side_inputs(const ContinuityMember& a, const ContinuityMember& b) {
  const DecorationFamily& fa = a.decorations;
  const DecorationFamily& fb = b.decorations;
  if (fa.kind != fb.kind || fa.tail_delta != fb.tail_delta) return false;
  switch (fa.kind) {
    case DecorationKind::zero:
      break;
    case DecorationKind::two_sided_exponential:
      if (fa.rate != fb.rate) return false;
      break;
    case DecorationKind::limit_shifted: {
      if (fa.base_is_zero != fb.base_is_zero || fa.rate != fb.rate) return false;
      // Only the weak limit matters on the end side.
      const double la = (fa.decay_rate == 0.0) ? fa.drift_scale : 0.0;
      const double lb = (fb.decay_rate == 0.0) ? fb.drift_scale : 0.0;
      if (la != lb) return false;
      break;
    }
    case DecorationKind::custom_table:
      if (fa.table != fb.table) return false;
      break;
  }
  const CurveSpec& ca = a.curve;
  const CurveSpec& cb = b.curve;
  if (ca.kind != cb.kind || ca.delta != cb.delta) return false;
  switch (ca.kind) {
    case CurveKind::canonical_plus:
      return ca.unit_offset == cb.unit_offset;
    case CurveKind::constant:
      return ca.level == cb.level;
    case CurveKind::limit_profile:
    case CurveKind::custom:
      return false;  // callables are not comparable; stay conservative
  }
  return false;
}

}  // namespace

ContinuityReport continuity_experiment(std::span<const ContinuityMember> members,
                                       const ContinuityMember& limit,
                                       const PppConfig& ppp,
                                       std::span<const double> x_list, double s,
                                       std::int64_t n, int workers,
                                       std::uint64_t seed, double tol) {
  if (members.empty()) throw ConfigError("continuity: empty family sequence");
  const double delta = limit.curve.delta;
  const double tail = limit.decorations.tail_delta;
  for (const ContinuityMember& m : members) {
    if (m.curve.delta != delta || m.decorations.tail_delta != tail) {
      throw ConfigError("continuity: families must share a common delta");
    }
    curve_limits(m.curve, 0.0);
  }
  curve_limits(limit.curve, 0.0);

  const std::size_t n_members = members.size();

  struct State {
    std::vector<MeanAcc> f;      // per member
    std::vector<MeanAcc> gap;    // per member, paired against the limit
    MeanAcc f_limit;
    std::vector<double> us;
    void merge(const State& o) {
      if (f.empty()) {
        *this = o;
        return;
      }
      for (std::size_t i = 0; i < f.size(); ++i) {
        f[i].merge(o.f[i]);
        gap[i].merge(o.gap[i]);
      }
      f_limit.merge(o.f_limit);
    }
  };

  ContinuityReport report;
  report.tol = tol;

  const int w = resolve_workers(workers, n);
  for (std::size_t xi = 0; xi < x_list.size(); ++xi) {
    const double x = x_list[xi];
    const std::uint64_t x_seed = derive_seed(seed, xi);
    auto state = run_replicas<State>(n, w, [&](State& st, std::int64_t idx) {
      if (st.f.empty()) {
        st.f.resize(n_members);
        st.gap.resize(n_members);
      }
      RngStream rng(x_seed, static_cast<std::uint64_t>(idx));
      const ArrivalTimes arrivals = sample_ppp(ppp, s, rng);
      std::vector<double> times = arrivals.times;
      times.push_back(s);
      const PathSample path = sample_bm(x, times, rng);
      st.us.clear();
      for (std::size_t k = 0; k < arrivals.times.size(); ++k) {
        st.us.push_back(rng.next_uniform_open());
      }
      const double payoff_base = neg_part(path.values.back());

      const auto member_payoff = [&](const ContinuityMember& m) {
        for (std::size_t k = 0; k < arrivals.times.size(); ++k) {
          const double u = arrivals.times[k];
          const double y = m.decorations.quantile(DecorationLabel::finite(u), st.us[k]);
          if (path.values[k] > curve_limits(m.curve, u).gamma_inf_plus + y) return 0.0;
        }
        return payoff_base;
      };

      const double limit_payoff = member_payoff(limit);
      st.f_limit.add(limit_payoff);
      for (std::size_t m = 0; m < n_members; ++m) {
        const double payoff = member_payoff(members[m]);
        st.f[m].add(payoff);
        st.gap[m].add(payoff - limit_payoff);
      }
    });

    Estimate f_lim = make_estimate(state.f_limit, x_seed, w, 0.0);
    Estimate g_lim = estimate_fg({FgEnd::end, s, x},
                                 {{x, 0.0, s}, ppp, limit.curve, limit.decorations}, n,
                                 w, derive_seed(seed, 1000 + xi));
    report.f_limit.push_back(f_lim);
    report.g_limit.push_back(g_lim);

    for (std::size_t m = 0; m < n_members; ++m) {
      ContinuityRow row;
      row.r = static_cast<int>(m);
      row.x = x;
      row.f = make_estimate(state.f[m], x_seed, w, 0.0);
      row.gap = std::fabs(state.gap[m].mean());
      row.gap_se = state.gap[m].std_error();
      row.g = estimate_fg({FgEnd::end, s, x},
                          {{x, 0.0, s}, ppp, members[m].curve, members[m].decorations},
                          n, w, derive_seed(seed, 1000 + xi));
      report.rows.push_back(row);
    }
  }

  report.end_side_fixed = true;
  for (const ContinuityMember& m : members) {
    if (!same_end_side_inputs(m, limit)) report.end_side_fixed = false;
  }

  report.g_bit_identical = true;
  for (std::size_t xi = 0; xi < x_list.size(); ++xi) {
    for (const ContinuityRow& row : report.rows) {
      if (row.x == x_list[xi] &&
          std::memcmp(&row.g.value, &report.g_limit[xi].value, sizeof(double)) != 0) {
        report.g_bit_identical = false;
      }
    }
  }

  bool pass = true;
  for (std::size_t xi = 0; xi < x_list.size(); ++xi) {
    double prev_gap = 0.0;
    bool first = true;
    const ContinuityRow* last_row = nullptr;
    for (const ContinuityRow& row : report.rows) {
      if (row.x != x_list[xi]) continue;
      if (!first && row.gap > prev_gap) pass = false;
      prev_gap = row.gap;
      first = false;
      last_row = &row;
    }
    if (last_row == nullptr || last_row->gap >= tol + 3.0 * last_row->gap_se) pass = false;
  }
  if (report.end_side_fixed && !report.g_bit_identical) pass = false;
  report.verdict = pass ? Verdict::PASS : Verdict::FAIL;
  return report;
}

MonotonicityReport monotonicity_coupled(const BarrierExperiment& base, double x_lo,
                                        double y_lo, double x_hi, double y_hi,
                                        std::int64_t n, int workers,
                                        std::uint64_t seed) {
  if (!(x_lo <= x_hi && y_lo <= y_hi)) {
    throw std::domain_error("monotonicity_coupled: need componentwise ordering");
  }
  const double t = base.endpoints.t;
  {
    BarrierExperiment check = base;
    check.endpoints = {x_lo, y_lo, t};
    require_envelope(check, t);
  }

  struct State {
    MeanAcc low, high;
    std::int64_t violations = 0;
    void merge(const State& o) {
      low.merge(o.low);
      high.merge(o.high);
      violations += o.violations;
    }
  };

  const int w = resolve_workers(workers, n);
  WallTimer timer;
  auto state = run_replicas<State>(n, w, [&](State& st, std::int64_t idx) {
    RngStream rng(seed, static_cast<std::uint64_t>(idx));
    const ArrivalTimes arrivals = sample_ppp(base.ppp, t, rng);
    const PathSample path = sample_bridge(x_lo, y_lo, t, arrivals.times, rng);
    const auto labels = arrival_labels(arrivals, FgEnd::start);
    const auto decos = sample_decorations(base.decorations, labels, rng);

    bool ind_lo = true;
    bool ind_hi = true;
    for (std::size_t k = 0; k < arrivals.times.size(); ++k) {
      const double u = arrivals.times[k];
      const double bound = eval_curve(base.curve, t, u) + decos[k];
      const double shift = (x_hi - x_lo) * (1.0 - u / t) + (y_hi - y_lo) * (u / t);
      if (path.values[k] > bound) ind_lo = false;
      if (path.values[k] + shift > bound) ind_hi = false;
    }
    st.low.add(ind_lo ? 1.0 : 0.0);
    st.high.add(ind_hi ? 1.0 : 0.0);
    if (ind_hi && !ind_lo) ++st.violations;
  });

  MonotonicityReport report;
  report.low = make_estimate(state.low, seed, w, timer.seconds());
  report.high = make_estimate(state.high, seed, w, 0.0);
  report.violations = state.violations;
  report.n = n;
  report.verdict = (state.violations == 0) ? Verdict::PASS : Verdict::FAIL;
  return report;
}

}  // namespace barrier_mc
