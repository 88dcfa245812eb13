#pragma once

#include <array>
#include <cstdint>

namespace barrier_mc {

// Counter-based random stream (Philox 4x32-10, Salmon et al. 2011).
//
// A stream is addressed by (master_seed, stream_id) and every output is a
// pure function of that address and the draw counter. Two consequences the
// rest of the library relies on:
//   * the same (master_seed, stream_id) always replays the same sequence,
//     on any platform, at any optimization level;
//   * distinct stream_ids give statistically independent streams, so one
//     stream per Monte Carlo replica can be handed to any worker thread
//     without coordination.
//
// All continuous variates are produced by inverse-cdf transforms of the
// 64-bit counter output (normals via Wichura's AS241), never by rejection,
// so the number of raw draws consumed per variate is fixed. Coupled
// estimators (common-random-number comparisons) depend on that.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  std::uint64_t next_u64();

  // Uniform on [0,1), 53-bit resolution.
  double next_uniform();

  // Uniform on (0,1); safe as input to inverse cdfs with log singularities.
  double next_uniform_open();

  // Standard normal via AS241 applied to next_uniform_open().
  double next_normal();

  // Exponential with the given rate, strictly positive.
  double next_exponential(double rate);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  std::uint64_t master_seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t block_counter_ = 0;
  std::array<std::uint64_t, 2> buf_{};
  int buf_used_ = 2;
};

// Inverse of the standard normal cdf (AS241, PPND16). Relative error below
// 1e-15 over (0,1); p outside (0,1) is a domain error.
double inverse_normal_cdf(double p);

// Derives an independent child seed for a named estimator stage, so that
// e.g. the survival run and the f/g runs of one experiment never share
// streams. Stages are tagged with small integers.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag);

}  // namespace barrier_mc
