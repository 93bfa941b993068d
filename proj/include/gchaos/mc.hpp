#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gchaos/norms.hpp"
#include "gchaos/partition.hpp"
#include "gchaos/tensor.hpp"

namespace gchaos {

// Decoupled chaos: each realization draws d fresh independent standard
// normal vectors and contracts them into the tensor. Samples come in fixed
// chunks of 4096 with per-chunk substreams, so the stream is identical for
// any thread count.
std::vector<double> sample_decoupled(const Tensor& a, std::size_t n,
                                     std::uint64_t seed, int threads = 1);

// Coupled chaos over a single Gaussian vector. Requires all axis lengths
// equal and support only on strictly increasing multi-indices.
std::vector<double> sample_coupled(const Tensor& a, std::size_t n,
                                   std::uint64_t seed, int threads = 1);

struct PnormEstimate {
  double p = 0.0;
  double value = 0.0;
  double lo = 0.0;  // bootstrap percentile 2.5%
  double hi = 0.0;  // bootstrap percentile 97.5%
  double se = 0.0;  // bootstrap standard error
  bool degenerate = false;           // all samples zero
  bool conditioning_warning = false;  // one sample carries >50% of the p-sum
};

// ((1/N) sum |S_n|^p)^(1/p) with scaled accumulation (moments normalized by
// the largest sample, so no overflow) and a seeded percentile bootstrap.
std::vector<PnormEstimate> empirical_pnorm(std::span<const double> samples,
                                           const std::vector<double>& p_grid,
                                           std::uint64_t seed,
                                           int resamples = 200);

struct TailPoint {
  double t = 0.0;
  double phat = 0.0;
  double lo = 0.0;  // Wilson 95%
  double hi = 0.0;
  std::size_t count = 0;
};

std::vector<TailPoint> empirical_tail(std::span<const double> samples,
                                      const std::vector<double>& t_grid);

struct ExpectedNormEstimate {
  std::size_t draws = 0;
  double mean = 0.0;
  double lo = 0.0;  // normal-approximation 95%
  double hi = 0.0;
  std::vector<double> values;  // per-draw norms
  int unconverged = 0;         // draws whose iterative norm did not converge
};

// Expected contracted norm: contract the axes in `contracted` (1-based)
// with fresh Gaussian vectors, take the partition norm of the residual under
// `residual_partition` (over the residual axes renumbered 1..r in ascending
// original order), and average over draws. When every axis is contracted the
// per-draw value is the absolute value of the scalar.
ExpectedNormEstimate expected_contracted_norm(
    const Tensor& a, const std::vector<int>& contracted,
    const Partition& residual_partition, std::size_t draws, std::uint64_t seed,
    const SolverConfig& cfg = {}, int threads = 1);

}  // namespace gchaos
