#pragma once

namespace barrier_mc {

// Endpoints of a Brownian bridge on [0, t].
struct BridgeEndpoints {
  double x0 = 0.0;
  double y_t = 0.0;
  double t = 1.0;
};

struct GaussianMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// exp(e) with e <= -745 flushed to exactly 0 instead of a subnormal, so
// downstream comparisons never see underflow noise.
double exp_clamped(double exponent);

// Ballot theorem: probability that the bridge stays <= 0 on all of [0, t].
// Zero as soon as either endpoint is above (or at) the barrier; otherwise
// 1 - exp(-2 x0^- y_t^- / t), evaluated with expm1 so the small-exponent
// regime ~ 2 x0^- y_t^- / t keeps full precision.
double ballot_survival(const BridgeEndpoints& e);

// Reflection identity: P(sup of a 0->0 bridge of length s reaches z) for
// z >= 0. z < 0 is a domain error; callers own the trivial case.
double bridge_max_tail(double z, double s);

// Probability that a Brownian bridge of length h from w0 to w1 touches the
// linear barrier running from b0 to b1. Equals 1 when an endpoint already
// sits at or above the barrier. This is the per-segment correction used to
// turn a grid maximum into a continuous one.
double segment_crossing_prob(double w0, double w1, double b0, double b1, double h);

// Marginal law of the bridge at interior time r: mean interpolates from x0
// at r=0 to y_t at r=t, variance is r(t-r)/t.
GaussianMoments bridge_marginal(const BridgeEndpoints& e, double r);

}  // namespace barrier_mc
