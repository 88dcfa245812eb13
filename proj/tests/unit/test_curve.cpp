#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "barrier_mc/curve.hpp"
#include "barrier_mc/errors.hpp"

using namespace barrier_mc;

TEST_CASE("wedge basics and domain") {
  CHECK(wedge(10.0, 0.0).value == 0.0);
  CHECK(wedge(10.0, 5.0).value == 5.0);
  CHECK(wedge(10.0, 7.0).value == 3.0);
  CHECK(wedge(10.0, 10.0).value == 0.0);
  CHECK_THROWS_AS((void)wedge(10.0, -0.5), std::domain_error);
  CHECK_THROWS_AS((void)wedge(10.0, 10.5), std::domain_error);
}

TEST_CASE("canonical curve values") {
  const CurveSpec c = CurveSpec::canonical(0.25);
  CHECK(eval_curve(c, 8.0, 0.0) == 4.0);
  // 4 * (1 + 4^(1/4)) = 4 * (1 + sqrt(2)); the arithmetic is the oracle.
  CHECK(eval_curve(c, 8.0, 4.0) ==
        doctest::Approx(4.0 * (1.0 + std::sqrt(2.0))).epsilon(1e-15));
  CHECK(eval_curve(CurveSpec::constant(0.0, 0.25), 3.0, 1.0) == 0.0);

  const CurveSpec bare = CurveSpec::canonical(0.25, /*unit_offset=*/false);
  CHECK(eval_curve(bare, 8.0, 0.0) == 0.0);
  CHECK(eval_curve(bare, 8.0, 4.0) == doctest::Approx(4.0 * std::sqrt(2.0)));
}

TEST_CASE("canonical curve is symmetric on an exactly representable lattice") {
  const CurveSpec c = CurveSpec::canonical(0.3);
  const double t = 64.0;
  for (int k = 0; k <= 1024; ++k) {
    const double u = t * static_cast<double>(k) / 1024.0;
    CHECK(eval_curve(c, t, u) == eval_curve(c, t, t - u));
  }
}

TEST_CASE("envelope validation") {
  const double t = 100.0;
  const auto grid = default_envelope_grid(t);

  CHECK(validate_envelope(CurveSpec::canonical(0.25), t, grid).ok);
  CHECK(validate_envelope(CurveSpec::canonical(0.25, false), t, grid).ok);
  CHECK(validate_envelope(CurveSpec::constant(0.0, 0.25), t, grid).ok);

  const auto low = validate_envelope(CurveSpec::constant(-10.0, 0.25), t, grid);
  CHECK_FALSE(low.ok);
  CHECK(low.value == -10.0);

  // Linear growth beats the sublinear envelope: at u=50, 50 > 4(1+50^(1/4)).
  const CurveSpec linear = CurveSpec::custom(0.25, [](double, double u) { return u; });
  const auto lin = validate_envelope(linear, t, grid);
  CHECK_FALSE(lin.ok);
  CHECK(lin.u <= 50.0);
  CHECK(lin.value > 4.0 * (1.0 + std::pow(lin.u < 50.0 ? lin.u : 50.0, 0.25)) - 1e-9);
}

TEST_CASE("regularity validation") {
  const double t = 64.0;
  const auto triples = default_regularity_triples(t);

  CHECK(validate_regularity(CurveSpec::constant(0.0, 0.25), t, triples).ok);
  CHECK(validate_regularity(CurveSpec::canonical(0.25), t, triples).ok);
  CHECK(validate_regularity(CurveSpec::canonical(0.1), t, triples).ok);

  // A deep spike at r breaks the first chord inequality for u near r.
  const CurveSpec spike = CurveSpec::custom(0.25, [](double, double u) {
    return (u >= 31.0 && u <= 33.0) ? -100.0 : 0.0;
  });
  const auto bad = validate_regularity(spike, t, triples);
  CHECK_FALSE(bad.ok);
  CHECK(bad.lhs > bad.rhs);

  const std::vector<RegularityTriple> malformed{{3.0, 2.0, 5.0}};
  CHECK_THROWS_AS((void)validate_regularity(CurveSpec::constant(0.0, 0.25), t, malformed),
                  std::domain_error);
}

TEST_CASE("curve limits") {
  const CurveSpec c = CurveSpec::canonical(0.25);
  const auto at0 = curve_limits(c, 0.0);
  CHECK(at0.gamma_inf_plus == 4.0);
  CHECK(at0.gamma_inf_minus == 4.0);
  const auto at16 = curve_limits(c, 16.0);
  CHECK(at16.gamma_inf_plus == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(at16.gamma_inf_minus == doctest::Approx(12.0).epsilon(1e-15));

  const auto constant = curve_limits(CurveSpec::constant(2.5, 0.25), 7.0);
  CHECK(constant.gamma_inf_plus == 2.5);
  CHECK(constant.gamma_inf_minus == 2.5);

  const CurveSpec profile = CurveSpec::profile(
      0.25, [](double u) { return 1.0 + u; }, [](double u) { return 2.0 + u; });
  CHECK(curve_limits(profile, 3.0).gamma_inf_plus == 4.0);
  CHECK(curve_limits(profile, 3.0).gamma_inf_minus == 5.0);
  CHECK(eval_curve(profile, 10.0, 2.0) == 3.0);   // plus side
  CHECK(eval_curve(profile, 10.0, 8.0) == 4.0);   // minus side, t - u = 2

  CHECK_THROWS_AS((void)curve_limits(CurveSpec::custom(0.25, [](double, double) {
                    return 0.0;
                  }), 1.0),
                  ConfigError);
}

TEST_CASE("curve converges to its limit as t grows") {
  const CurveSpec c = CurveSpec::canonical(0.2);
  const double u = 3.0;
  const double limit = curve_limits(c, u).gamma_inf_plus;
  double prev = 1e300;
  for (double t : {1e2, 1e4, 1e6}) {
    const double gap = std::fabs(eval_curve(c, t, u) - limit);
    CHECK(gap <= prev);
    prev = gap;
  }
  CHECK(prev == 0.0);  // the wedge equals u itself once t >= 2u
}

TEST_CASE("delta outside (0, 1/2) is rejected") {
  CHECK_THROWS_AS(CurveSpec::canonical(0.5), std::domain_error);
  CHECK_THROWS_AS(CurveSpec::canonical(0.0), std::domain_error);
  CHECK_THROWS_AS(CurveSpec::constant(0.0, -0.1), std::domain_error);
}
