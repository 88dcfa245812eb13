#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "barrier_mc/analytic.hpp"
#include "barrier_mc/curve.hpp"
#include "barrier_mc/sampling.hpp"

namespace barrier_mc {

enum class Verdict { PASS, FAIL, INCONCLUSIVE, NA };
const char* to_string(Verdict v);

// Monte Carlo point estimate with its sampling error and provenance. For a
// fixed configuration the value is reproducible from (master_seed, workers):
// replicas own counter-based streams keyed by replica index and partial sums
// are reduced in worker order, so scheduling never enters.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t master_seed = 0;
  int workers = 1;
  double wall_time_s = 0.0;
};

// One barrier experiment: bridge endpoints (the horizon is endpoints.t),
// arrival intensity, barrier curve and decoration law. The curve must pass
// its envelope check on the default grid before any estimator will run it.
struct BarrierExperiment {
  BridgeEndpoints endpoints;
  PppConfig ppp;
  CurveSpec curve;
  DecorationFamily decorations;
};

enum class FgEnd { start, end };

// Configuration of the truncated limit functionals: the start side runs the
// curve's plus-limits with decorations at their own labels, the end side the
// minus-limits with i.i.d. copies of the limit decoration.
struct FgSide {
  FgEnd side = FgEnd::start;
  double s_horizon = 100.0;
  double x_start = 0.0;
};

struct RepulsionConfig {
  double M = 1.0;        // >= 1
  double s_inner = 4.0;  // in (2, t/2]
  double grid_step = 0.5;
};

// Endpoint region over which the asymptotics is uniform:
// x, y <= 1/epsilon and (x^- + 1)(y^- + 1) <= t^(1 - epsilon).
struct RangeRegion {
  double epsilon = 0.1;
  bool contains(double x, double y, double t) const;
};

// Survival event at the observation times: every arrival in [window_lo,
// window_hi] satisfies W <= gamma + Y, boundary equality surviving. The path
// must be a bridge sampled exactly at the arrival times, with one decoration
// per time. Vacuously true without arrivals in the window.
bool indicator_Q(const PathSample& path, const CurveSpec& curve,
                 std::span<const double> decorations, double window_lo,
                 double window_hi);

// Same event against the curve's limit profile instead of gamma_{t,u}:
// plus-limits for the start side, minus-limits for the end side.
bool indicator_Q_limit(const PathSample& path, const CurveSpec& curve, FgEnd side,
                       std::span<const double> decorations, double window_lo,
                       double window_hi);

// P(Q_t) for the bridge of the experiment. Exact in the event (arrivals are
// the only constraint); the only error is Monte Carlo.
Estimate estimate_survival(const BarrierExperiment& exp, std::int64_t n,
                           int workers, std::uint64_t master_seed);

// E[(W_s)^- ; survival up to s] for free motion from cfg.x_start.
Estimate estimate_fg(const FgSide& cfg, const BarrierExperiment& exp,
                     std::int64_t n, int workers, std::uint64_t master_seed);

struct AsymptoticRow {
  double t = 0.0;
  Estimate p;
  double scaled = 0.0;  // t * p_hat
  double ratio = 0.0;   // t * p_hat / (2 f g)
  double ratio_se = 0.0;
  Verdict verdict = Verdict::NA;  // set on the largest-t row
};

struct AsymptoticReport {
  std::vector<AsymptoticRow> rows;
  Estimate f, g;
  double s_horizon = 0.0;
  double tol = 0.0;
  Verdict verdict = Verdict::NA;
};

// Compares t * p_hat(t) against 2 f_s(x) g_s(y) across the t grid. PASS/FAIL
// is decided on the largest t and withheld (INCONCLUSIVE) while the ratio's
// 3-sigma half width exceeds tol.
AsymptoticReport check_asymptotic(const BarrierExperiment& base, double x, double y,
                                  std::span<const double> t_grid, double s,
                                  std::int64_t n, int workers, std::uint64_t seed,
                                  double tol, double epsilon);

struct TrendFit {
  double slope = 0.0;
  double se = 0.0;
  std::size_t points = 0;
};

// Least-squares slope of y against x with the error bar propagated from the
// per-point standard errors (the points are independent estimates).
TrendFit fit_trend(std::span<const double> x, std::span<const double> y,
                   std::span<const double> se);

struct BoundScanCell {
  double x = 0.0, y = 0.0, t = 0.0;
  Estimate p;
  double ratio = 0.0;  // t * p_hat / ((x^- + 1)(y^- + 1))
  double ratio_se = 0.0;
  bool mixed_sign = false;  // xy <= 0: the Gaussian-normalized ratio applies
  double mixed_ratio = 0.0;
  double mixed_ratio_se = 0.0;
};

struct BoundScanSeries {
  double x = 0.0, y = 0.0;
  TrendFit trend;
};

struct BoundScanReport {
  std::vector<BoundScanCell> cells;
  double c_hat = 0.0;  // empirical constant: max cell ratio
  double c_hat_se = 0.0;
  std::vector<BoundScanSeries> series;  // one trend per (x, y) with >= 3 t's
  Verdict verdict = Verdict::NA;
};

// The scaled-survival table behind the bounded-constant check. The constant
// is an output (max + error bar), never an input.
BoundScanReport scan_bound_constant(const BarrierExperiment& base,
                                    const RangeRegion& region,
                                    std::span<const double> x_list,
                                    std::span<const double> y_list,
                                    std::span<const double> t_list, std::int64_t n,
                                    int workers, std::uint64_t seed);

struct RepulsionResult {
  Estimate conditional;  // ratio-of-means with delta-method std error
  double p_joint = 0.0, p_joint_se = 0.0;
  double p_surv = 0.0, p_surv_se = 0.0;
  Verdict verdict = Verdict::NA;  // INCONCLUSIVE when the denominator CI hits 0
};

// P(near-barrier excursion in [s, t-s] | survival). The continuous maximum is
// evaluated on arrivals plus a uniform grid, with the linear-barrier crossing
// probability applied to every in-window segment through stochastic rounding,
// so unseen excursions between grid points are accounted for.
RepulsionResult estimate_repulsion(const BarrierExperiment& exp,
                                   const RepulsionConfig& rc, std::int64_t n,
                                   int workers, std::uint64_t seed);

struct RefinementCheck {
  double coarse = 0.0, fine = 0.0;  // conditional estimates at h and h/2
  double diff = 0.0, diff_se = 0.0;
  double coarse_se = 0.0;
  bool within_one_se = false;
};

// Grid-halving control: evaluates the repulsion event at step h and h/2 on
// the same sampled paths, so the reported difference isolates discretization
// from Monte Carlo noise.
RefinementCheck repulsion_refinement_check(const BarrierExperiment& exp,
                                           const RepulsionConfig& rc, std::int64_t n,
                                           int workers, std::uint64_t seed);

struct ContinuityMember {
  DecorationFamily decorations;
  CurveSpec curve;
};

struct ContinuityRow {
  int r = 0;
  double x = 0.0;
  Estimate f;
  double gap = 0.0;  // paired |f_r - f_limit| under common random numbers
  double gap_se = 0.0;
  Estimate g;
};

struct ContinuityReport {
  std::vector<ContinuityRow> rows;
  std::vector<Estimate> f_limit;  // one per x
  std::vector<Estimate> g_limit;
  bool end_side_fixed = false;    // member end-side inputs identical
  bool g_bit_identical = false;
  double tol = 0.0;
  Verdict verdict = Verdict::NA;
};

// Runs the family sequence and its limit member under shared streams. All
// members must carry one common delta; per replica, every member sees the
// same arrivals, path and base uniforms, so the f-gaps are coupled pathwise.
// When the end-side inputs are fixed across members, the g estimates are
// required to be bit-identical.
ContinuityReport continuity_experiment(std::span<const ContinuityMember> members,
                                       const ContinuityMember& limit,
                                       const PppConfig& ppp,
                                       std::span<const double> x_list, double s,
                                       std::int64_t n, int workers,
                                       std::uint64_t seed, double tol);

struct MonotonicityReport {
  Estimate low, high;  // survival at the lower / higher endpoint pair
  std::int64_t violations = 0;
  std::int64_t n = 0;
  Verdict verdict = Verdict::NA;
};

// Endpoint-monotonicity coupling: one bridge from the lower pair, the second
// path obtained by adding the linear interpolation of the endpoint gaps.
// Survival of the higher path implies survival of the lower one on every
// replica; any violation is counted.
MonotonicityReport monotonicity_coupled(const BarrierExperiment& base, double x_lo,
                                        double y_lo, double x_hi, double y_hi,
                                        std::int64_t n, int workers,
                                        std::uint64_t seed);

}  // namespace barrier_mc
