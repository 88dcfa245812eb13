#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "barrier_mc/errors.hpp"
#include "barrier_mc/estimators.hpp"
#include "barrier_mc/rng.hpp"
#include "test_support.hpp"

using namespace barrier_mc;

namespace {

constexpr std::uint64_t kSeed = 424243u;

BarrierExperiment zero_curve_experiment(double x, double y, double t, double lambda) {
  return {{x, y, t}, {lambda}, CurveSpec::constant(0.0, 0.25),
          DecorationFamily::zero(0.25)};
}

// Brute-force oracle for the start-side functional at s=1, lambda=1, zero
// curve and zero decorations: condition on the arrival count k <= 4, quadrature
// over the ordered arrival times, and propagate the path density over a
// Gauss-Legendre grid on the negative axis between observations. Returns a
// lower value plus a rigorous truncation allowance for k >= 5.
struct FgOracle {
  double value = 0.0;
  double truncation = 0.0;
};

class FgQuadrature {
 public:
  FgQuadrature() {
    test_support::gauss_legendre(kZNodes, z_ref_, wz_ref_);
    // map [-1,1] to [-L, 0]
    for (int i = 0; i < kZNodes; ++i) {
      z_.push_back(0.5 * (z_ref_[i] + 1.0) * kL - kL);
      wz_.push_back(wz_ref_[i] * 0.5 * kL);
    }
    test_support::gauss_legendre(kTNodes, t_ref_, wt_ref_);
  }

  FgOracle oracle(double x_start) const {
    const auto pmf = test_support::poisson_pmf(1.0, 4);
    double total = pmf[0] * test_support::normal_neg_part_mean(x_start, 1.0);
    for (int k = 1; k <= 4; ++k) {
      double fact = 1.0;
      for (int j = 2; j <= k; ++j) fact *= j;
      total += pmf[k] * fact * simplex(k, x_start);
    }
    double tail_mass = 1.0;
    for (double p : pmf) tail_mass -= p;
    return {total, tail_mass * test_support::normal_neg_part_mean(x_start, 1.0)};
  }

 private:
  static constexpr int kZNodes = 64;
  static constexpr int kTNodes = 12;
  static constexpr double kL = 9.0;

  static double gauss_density(double d, double var) {
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * M_PI * var);
  }

  // integral over 0 < s_1 < ... < s_k < 1 of
  //   E[prod 1{W_{s_i} <= 0} * W_1^-] for BM started at x.
  double simplex(int k, double x) const {
    std::vector<double> q;  // density restricted to [-L, 0] at the previous time
    return descend(1, k, 0.0, x, q);
  }

  double descend(int level, int k, double s_prev, double x,
                 const std::vector<double>& q) const {
    const double width = 1.0 - s_prev;
    double total = 0.0;
    for (int i = 0; i < kTNodes; ++i) {
      const double s = s_prev + 0.5 * (t_ref_[i] + 1.0) * width;
      const double dt = s - s_prev;
      std::vector<double> q_next(kZNodes, 0.0);
      if (level == 1) {
        for (int a = 0; a < kZNodes; ++a) q_next[a] = gauss_density(z_[a] - x, dt);
      } else {
        for (int a = 0; a < kZNodes; ++a) {
          double acc = 0.0;
          for (int b = 0; b < kZNodes; ++b) {
            acc += wz_[b] * q[b] * gauss_density(z_[a] - z_[b], dt);
          }
          q_next[a] = acc;
        }
      }
      double value;
      if (level == k) {
        double acc = 0.0;
        const double sigma = std::sqrt(1.0 - s);
        for (int a = 0; a < kZNodes; ++a) {
          acc += wz_[a] * q_next[a] *
                 test_support::normal_neg_part_mean(z_[a], sigma);
        }
        value = acc;
      } else {
        value = descend(level + 1, k, s, x, q_next);
      }
      total += wt_ref_[i] * 0.5 * width * value;
    }
    return total;
  }

  std::vector<double> z_ref_, wz_ref_, z_, wz_;
  std::vector<double> t_ref_, wt_ref_;
};

}  // namespace

TEST_CASE("indicator_Q: empty window, boundary equality, misalignment") {
  RngStream rng(kSeed, 0);
  const CurveSpec curve = CurveSpec::constant(0.0, 0.25);

  PathSample empty{{}, {}, BridgeKind{0.0, 0.0, 4.0}};
  CHECK(indicator_Q(empty, curve, {}, 0.0, 4.0));

  PathSample one{{1.0}, {1.0}, BridgeKind{0.0, 0.0, 4.0}};
  const std::vector<double> no_help{0.0};
  CHECK_FALSE(indicator_Q(one, curve, no_help, 0.0, 4.0));
  const std::vector<double> exact{1.0};  // boundary equality survives
  CHECK(indicator_Q(one, curve, exact, 0.0, 4.0));
  const std::vector<double> split{0.5};
  CHECK_FALSE(indicator_Q(one, CurveSpec::constant(0.4999, 0.25), split, 0.0, 4.0));
  CHECK(indicator_Q(one, CurveSpec::constant(0.5, 0.25), split, 0.0, 4.0));

  CHECK(indicator_Q(one, curve, no_help, 2.0, 4.0));  // arrival outside window

  const std::vector<double> misaligned{0.0, 0.0};
  CHECK_THROWS_AS((void)indicator_Q(one, curve, misaligned, 0.0, 4.0),
                  std::domain_error);
  PathSample free{{1.0}, {1.0}, FreeKind{0.0}};
  CHECK_THROWS_AS((void)indicator_Q(free, curve, no_help, 0.0, 4.0),
                  std::domain_error);
}

TEST_CASE("indicator_Q_limit uses the requested side of the limit profile") {
  const CurveSpec profile = CurveSpec::profile(
      0.25, [](double) { return 1.0; }, [](double) { return -1.0; });
  PathSample path{{1.0}, {0.0}, FreeKind{0.0}};
  const std::vector<double> zero{0.0};
  CHECK(indicator_Q_limit(path, profile, FgEnd::start, zero, 0.0, 2.0));
  CHECK_FALSE(indicator_Q_limit(path, profile, FgEnd::end, zero, 0.0, 2.0));
}

TEST_CASE("estimate_survival: unreachable barrier, validation") {
  BarrierExperiment exp{{0.0, 0.0, 2.0},
                        {1.0},
                        CurveSpec::constant(1e9, 1e-10),
                        DecorationFamily::zero(1e-10)};
  const Estimate est = estimate_survival(exp, 1000, 2, kSeed);
  CHECK(est.value == 1.0);
  CHECK(est.std_error == 0.0);
  CHECK(est.n_samples == 1000);

  CHECK_THROWS_AS((void)estimate_survival(exp, 999, 1, kSeed), std::domain_error);
  BarrierExperiment bad = exp;
  bad.curve = CurveSpec::constant(-10.0, 0.25);
  CHECK_THROWS_AS((void)estimate_survival(bad, 1000, 1, kSeed), ConfigError);
}

TEST_CASE("estimate_survival is deterministic and worker-count invariant") {
  BarrierExperiment exp{{-1.0, -1.0, 4.0},
                        {1.0},
                        CurveSpec::canonical(0.25),
                        DecorationFamily::laplace(1.0, 0.25)};
  const Estimate a = estimate_survival(exp, 20000, 1, kSeed);
  const Estimate b = estimate_survival(exp, 20000, 2, kSeed);
  const Estimate c = estimate_survival(exp, 20000, 5, kSeed);
  const Estimate d = estimate_survival(exp, 20000, 2, kSeed);
  CHECK(a.value == b.value);
  CHECK(b.value == c.value);
  CHECK(c.value == d.value);
  CHECK(b.std_error == d.std_error);
  const Estimate other = estimate_survival(exp, 20000, 2, kSeed + 1);
  CHECK(other.value != b.value);
}

TEST_CASE("survival golden value with dual-seed cross check") {
  // Canonical curve, Laplace decorations, endpoints at the origin, t=64.
  BarrierExperiment exp{{0.0, 0.0, 64.0},
                        {1.0},
                        CurveSpec::canonical(0.25),
                        DecorationFamily::laplace(1.0, 0.25)};
  const Estimate a = estimate_survival(exp, 1000000, 0, 20240817u);
  const Estimate b = estimate_survival(exp, 1000000, 0, 918273645u);
  CHECK(std::fabs(a.value - b.value) <=
        3.0 * std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error));
  // Golden value recorded from this configuration; indicator estimates are
  // exact integer counts over n, so the value is worker-count independent.
  CHECK(a.value == 975629.0 / 1000000.0);
}

TEST_CASE("CI scaling: quadrupling n halves the standard error") {
  BarrierExperiment exp = zero_curve_experiment(-1.0, -1.0, 4.0, 1.0);
  const Estimate small = estimate_survival(exp, 10000, 2, kSeed);
  const Estimate big = estimate_survival(exp, 40000, 2, kSeed);
  const double ratio = big.std_error / small.std_error;
  CHECK(ratio >= 0.45);
  CHECK(ratio <= 0.55);

  const Estimate fs = estimate_fg({FgEnd::start, 4.0, -1.0}, exp, 10000, 2, kSeed);
  const Estimate fb = estimate_fg({FgEnd::start, 4.0, -1.0}, exp, 40000, 2, kSeed);
  const double fratio = fb.std_error / fs.std_error;
  CHECK(fratio >= 0.45);
  CHECK(fratio <= 0.55);
}

TEST_CASE("dense observation approaches the ballot probability from above") {
  const double ballot = ballot_survival({-1.0, -1.0, 2.0});
  std::vector<Estimate> estimates;
  for (double lambda : {5.0, 20.0, 50.0}) {
    estimates.push_back(
        estimate_survival(zero_curve_experiment(-1.0, -1.0, 2.0, lambda), 200000, 0,
                          derive_seed(kSeed, static_cast<std::uint64_t>(lambda))));
  }
  for (std::size_t i = 0; i + 1 < estimates.size(); ++i) {
    const double se = std::sqrt(estimates[i].std_error * estimates[i].std_error +
                                estimates[i + 1].std_error * estimates[i + 1].std_error);
    CHECK(estimates[i].value >= estimates[i + 1].value - 3.0 * se);
  }
  for (const Estimate& est : estimates) {
    CHECK(est.value >= ballot - 3.0 * est.std_error);
  }
  // The gap above the continuous-observation limit shrinks as lambda grows.
  CHECK(estimates.back().value - ballot < estimates.front().value - ballot);
  CHECK(estimates.back().value - ballot < 0.08);
}

TEST_CASE("time reversal: reversed endpoints, curve and decorations agree") {
  // Canonical curves are symmetric; the u-dependent decoration family is
  // reversed through drift' = drift * exp(-decay t), decay' = -decay.
  const double t = 16.0;
  const double decay = 0.25;
  const double drift = 2.0;
  BarrierExperiment fwd{{-1.5, 0.5, t},
                        {1.0},
                        CurveSpec::canonical(0.25),
                        DecorationFamily::shifted(DecorationFamily::laplace(1.0, 0.25),
                                                  drift, decay)};
  BarrierExperiment rev = fwd;
  rev.endpoints = {0.5, -1.5, t};
  rev.decorations = DecorationFamily::shifted(DecorationFamily::laplace(1.0, 0.25),
                                              drift * std::exp(-decay * t), -decay);
  const Estimate pf = estimate_survival(fwd, 400000, 0, derive_seed(kSeed, 70));
  const Estimate pr = estimate_survival(rev, 400000, 0, derive_seed(kSeed, 71));
  const double se = std::sqrt(pf.std_error * pf.std_error + pr.std_error * pr.std_error);
  CHECK(std::fabs(pf.value - pr.value) <= 3.0 * se);
}

TEST_CASE("estimate_fg: far-above start gives a vanishing functional") {
  BarrierExperiment exp = zero_curve_experiment(0.0, 0.0, 1.0, 1.0);
  const Estimate est = estimate_fg({FgEnd::start, 1.0, 1e6}, exp, 10000, 2, kSeed);
  CHECK(est.value < 1e-3);
}

TEST_CASE("estimate_fg matches the arrival-count quadrature oracle") {
  // Start-side functional at s=1, x=-1, zero curve, zero decorations.
  const FgQuadrature quad;
  const FgOracle oracle = quad.oracle(-1.0);
  CHECK(oracle.value > 0.0);
  CHECK(oracle.truncation < 0.005);

  BarrierExperiment exp = zero_curve_experiment(0.0, 0.0, 1.0, 1.0);
  const Estimate a = estimate_fg({FgEnd::start, 1.0, -1.0}, exp, 10000000, 0,
                                 derive_seed(kSeed, 80));
  const Estimate b = estimate_fg({FgEnd::start, 1.0, -1.0}, exp, 10000000, 0,
                                 derive_seed(kSeed, 81));
  // Reproducibility across seeds.
  CHECK(std::fabs(a.value - b.value) <=
        3.0 * std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error));
  // Agreement with the truncated oracle, within truncation + 3 sigma.
  CHECK(a.value >= oracle.value - 3.0 * a.std_error);
  CHECK(a.value <= oracle.value + oracle.truncation + 3.0 * a.std_error);
}

TEST_CASE("estimate_fg slope limit: f_s(-x)/x approaches one") {
  BarrierExperiment exp = zero_curve_experiment(0.0, 0.0, 20.0, 1.0);
  const Estimate est = estimate_fg({FgEnd::start, 20.0, -50.0}, exp, 50000, 0,
                                   derive_seed(kSeed, 90));
  const double ratio = est.value / 50.0;
  CHECK(ratio >= 0.9);
  CHECK(ratio <= 1.1);
}

TEST_CASE("fg rejects missing limits and bad inputs") {
  BarrierExperiment exp = zero_curve_experiment(0.0, 0.0, 1.0, 1.0);
  exp.curve = CurveSpec::custom(0.25, [](double, double) { return 0.0; });
  CHECK_THROWS_AS((void)estimate_fg({FgEnd::start, 1.0, 0.0}, exp, 1000, 1, kSeed),
                  ConfigError);
  BarrierExperiment ok = zero_curve_experiment(0.0, 0.0, 1.0, 1.0);
  CHECK_THROWS_AS((void)estimate_fg({FgEnd::start, 0.0, 0.0}, ok, 1000, 1, kSeed),
                  std::domain_error);
}

TEST_CASE("check_asymptotic report structure and symmetric f/g agreement") {
  BarrierExperiment base = zero_curve_experiment(-1.0, -1.0, 0.0, 1.0);
  const std::vector<double> t_grid{16.0, 64.0};
  const AsymptoticReport report =
      check_asymptotic(base, -1.0, -1.0, t_grid, 10.0, 20000, 2, kSeed, 0.5, 0.1);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].t == 16.0);
  CHECK(report.rows[1].verdict == report.verdict);
  CHECK(report.f.value > 0.0);
  CHECK(report.g.value > 0.0);

  // Symmetric setup: the two sides share their law, so f_s(v) and g_s(v)
  // agree within noise.
  for (double v : {0.0, -1.0, -2.0}) {
    const Estimate f = estimate_fg({FgEnd::start, 10.0, v}, base, 100000, 0,
                                   derive_seed(kSeed, 200));
    const Estimate g = estimate_fg({FgEnd::end, 10.0, v}, base, 100000, 0,
                                   derive_seed(kSeed, 201));
    const double se = std::sqrt(f.std_error * f.std_error + g.std_error * g.std_error);
    CHECK(std::fabs(f.value - g.value) <= 3.0 * se);
  }

  // Region violation: x beyond 1/epsilon.
  CHECK_THROWS_AS((void)check_asymptotic(base, 20.0, -1.0, t_grid, 10.0, 20000, 2,
                                         kSeed, 0.5, 0.1),
                  ConfigError);

  // Tiny n with a tight tolerance withholds the verdict.
  const AsymptoticReport small =
      check_asymptotic(base, -1.0, -1.0, t_grid, 10.0, 2000, 2, kSeed, 0.01, 0.1);
  CHECK(small.verdict == Verdict::INCONCLUSIVE);
}

TEST_CASE("fit_trend flags significant slopes only") {
  const std::vector<double> x{0.0, 1.0, 2.0};
  const std::vector<double> flat{1.0, 1.0, 1.0};
  const std::vector<double> rising{1.0, 2.0, 3.0};
  const std::vector<double> se{0.01, 0.01, 0.01};
  const TrendFit f1 = fit_trend(x, flat, se);
  CHECK(std::fabs(f1.slope) <= 3.0 * f1.se);
  const TrendFit f2 = fit_trend(x, rising, se);
  CHECK(f2.slope > 3.0 * f2.se);
  CHECK_THROWS_AS((void)fit_trend({{0.0, 1.0}}, {{0.0, 1.0}}, {{0.1, 0.1}}),
                  std::domain_error);
}

TEST_CASE("scan_bound_constant: golden cell, dual seeds, region gate") {
  BarrierExperiment base{{0.0, 0.0, 0.0},
                         {1.0},
                         CurveSpec::canonical(0.25),
                         DecorationFamily::laplace(1.0, 0.25)};
  const std::vector<double> xs{0.0};
  const std::vector<double> ys{0.0};
  const std::vector<double> ts{64.0};
  const BoundScanReport a =
      scan_bound_constant(base, {0.1}, xs, ys, ts, 250000, 0, kSeed);
  const BoundScanReport b =
      scan_bound_constant(base, {0.1}, xs, ys, ts, 250000, 0, kSeed + 9);
  REQUIRE(a.cells.size() == 1);
  CHECK(a.cells[0].ratio > 0.0);
  CHECK(std::isfinite(a.cells[0].ratio));
  CHECK(a.verdict == Verdict::NA);  // single t: no trend
  const double se = std::sqrt(a.cells[0].ratio_se * a.cells[0].ratio_se +
                              b.cells[0].ratio_se * b.cells[0].ratio_se);
  CHECK(std::fabs(a.cells[0].ratio - b.cells[0].ratio) <= 3.0 * se);
  // mixed-sign normalization on an xy <= 0 cell
  const std::vector<double> xs2{1.0};
  const BoundScanReport m =
      scan_bound_constant(base, {0.1}, xs2, ys, ts, 100000, 0, kSeed);
  REQUIRE(m.cells.size() == 1);
  CHECK(m.cells[0].mixed_sign);
  CHECK(std::isfinite(m.cells[0].mixed_ratio));

  const std::vector<double> bad_x{100.0};
  CHECK_THROWS_AS(
      (void)scan_bound_constant(base, {0.1}, bad_x, ys, ts, 10000, 0, kSeed),
      ConfigError);
}

TEST_CASE("estimate_repulsion: trivial margin, edge window, validation") {
  BarrierExperiment exp = zero_curve_experiment(-1.0, -1.0, 16.0, 1.0);
  // Enormous margin: conditionally certain.
  const RepulsionResult sure = estimate_repulsion(exp, {1e6, 4.0, 0.5}, 5000, 2, kSeed);
  CHECK(sure.conditional.value == 1.0);
  CHECK(sure.verdict == Verdict::NA);

  // s = t/2 leaves a single-point window and still works.
  const RepulsionResult edge = estimate_repulsion(exp, {1.0, 8.0, 0.5}, 5000, 2, kSeed);
  CHECK(edge.conditional.value >= 0.0);
  CHECK(edge.conditional.value <= 1.0);

  CHECK_THROWS_AS((void)estimate_repulsion(exp, {1.0, 2.0, 0.5}, 5000, 2, kSeed),
                  std::domain_error);
  CHECK_THROWS_AS((void)estimate_repulsion(exp, {0.5, 4.0, 0.5}, 5000, 2, kSeed),
                  std::domain_error);
  CHECK_THROWS_AS((void)estimate_repulsion(exp, {1.0, 4.0, 2.0}, 5000, 2, kSeed),
                  std::domain_error);

  // Passes the envelope but breaks the chord regularity near its notch.
  BarrierExperiment irregular = exp;
  irregular.curve = CurveSpec::custom(0.25, [](double t, double u) {
    if (u >= 8.0 && u <= 8.6) return -4.0;
    return 4.0 * (1.0 + std::pow(std::min(u, t - u), 0.25));
  });
  CHECK_THROWS_AS((void)estimate_repulsion(irregular, {1.0, 4.0, 0.5}, 5000, 2, kSeed),
                  ConfigError);
}

TEST_CASE("repulsion refinement check runs and reports a small paired diff") {
  BarrierExperiment exp = zero_curve_experiment(-1.0, -1.0, 16.0, 1.0);
  const RefinementCheck check =
      repulsion_refinement_check(exp, {1.0, 4.0, 0.5}, 30000, 2, kSeed);
  CHECK(check.coarse >= 0.0);
  CHECK(check.coarse <= 1.0);
  CHECK(check.fine >= 0.0);
  CHECK(check.fine <= 1.0);
  CHECK(check.diff_se >= 0.0);
  CHECK(std::fabs(check.diff) <= 0.05);
}

TEST_CASE("continuity: identical family members collapse to zero gaps") {
  const ContinuityMember base{
      DecorationFamily::shifted(DecorationFamily::laplace(1.0, 0.25), 0.0, 0.0),
      CurveSpec::canonical(0.25)};
  const std::vector<ContinuityMember> members{base, base, base};
  const std::vector<double> xs{-1.0};
  const ContinuityReport report =
      continuity_experiment(members, base, {1.0}, xs, 10.0, 20000, 2, kSeed, 0.02);
  REQUIRE(report.rows.size() == 3);
  for (const ContinuityRow& row : report.rows) {
    CHECK(row.gap == 0.0);
    CHECK(row.f.value == report.f_limit[0].value);
  }
  CHECK(report.end_side_fixed);
  CHECK(report.g_bit_identical);
  CHECK(report.verdict == Verdict::PASS);
}

TEST_CASE("continuity: geometric shifts give halving, monotone gaps") {
  std::vector<ContinuityMember> members;
  for (int r = 0; r <= 5; ++r) {
    members.push_back({DecorationFamily::shifted(DecorationFamily::laplace(1.0, 0.25),
                                                 std::ldexp(1.0, -r), 0.0),
                       CurveSpec::canonical(0.25)});
  }
  const ContinuityMember limit{
      DecorationFamily::shifted(DecorationFamily::laplace(1.0, 0.25), 0.0, 0.0),
      CurveSpec::canonical(0.25)};
  const std::vector<double> xs{-1.0};
  const ContinuityReport report =
      continuity_experiment(members, limit, {1.0}, xs, 10.0, 100000, 0, kSeed, 0.02);
  REQUIRE(report.rows.size() == 6);
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
    CHECK(report.rows[i + 1].gap <= report.rows[i].gap);
  }
  CHECK(report.rows[0].gap > 4.0 * report.rows[4].gap);  // rough halving
  CHECK(report.rows.back().gap < 0.02 + 3.0 * report.rows.back().gap_se);
  // Limit laws differ across members here, so no end-side claim is made.
  CHECK_FALSE(report.end_side_fixed);
}

TEST_CASE("continuity: fixed end side keeps g bit-identical") {
  std::vector<ContinuityMember> members;
  for (int r = 0; r <= 3; ++r) {
    members.push_back({DecorationFamily::shifted(DecorationFamily::laplace(1.0, 0.25),
                                                 std::ldexp(1.0, -r), 1.0),
                       CurveSpec::canonical(0.25)});
  }
  const ContinuityMember limit{
      DecorationFamily::shifted(DecorationFamily::laplace(1.0, 0.25), 0.0, 1.0),
      CurveSpec::canonical(0.25)};
  const std::vector<double> xs{-1.0};
  const ContinuityReport report =
      continuity_experiment(members, limit, {1.0}, xs, 10.0, 50000, 2, kSeed, 0.02);
  CHECK(report.end_side_fixed);
  CHECK(report.g_bit_identical);

  // Mismatched deltas are rejected.
  std::vector<ContinuityMember> bad = members;
  bad[0].curve = CurveSpec::canonical(0.3);
  CHECK_THROWS_AS((void)continuity_experiment(bad, limit, {1.0}, xs, 10.0, 2000, 1,
                                              kSeed, 0.02),
                  ConfigError);
}

TEST_CASE("monotonicity coupling: identical pairs, ordered pairs, violations") {
  BarrierExperiment base{{-2.0, -2.0, 16.0},
                         {1.0},
                         CurveSpec::canonical(0.25),
                         DecorationFamily::laplace(1.0, 0.25)};
  const MonotonicityReport same =
      monotonicity_coupled(base, -2.0, -2.0, -2.0, -2.0, 20000, 2, kSeed);
  CHECK(same.violations == 0);
  CHECK(same.low.value == same.high.value);

  const MonotonicityReport ordered =
      monotonicity_coupled(base, -2.0, -2.0, 0.0, 0.0, 100000, 0, kSeed);
  CHECK(ordered.violations == 0);
  CHECK(ordered.verdict == Verdict::PASS);
  const double se = std::sqrt(ordered.low.std_error * ordered.low.std_error +
                              ordered.high.std_error * ordered.high.std_error);
  CHECK(ordered.low.value >= ordered.high.value - 3.0 * se);

  CHECK_THROWS_AS(
      (void)monotonicity_coupled(base, 0.0, 0.0, -1.0, 0.0, 20000, 2, kSeed),
      std::domain_error);
}
