#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gchaos/partition.hpp"
#include "gchaos/tensor.hpp"

namespace gchaos {

struct SolverConfig {
  int restarts = 16;      // random starts in addition to the HOSVD start
  int max_iters = 500;    // alternating-maximization sweeps per start
  double tol = 1e-10;     // relative objective change at convergence
  std::uint64_t seed = 0;
  int threads = 1;
};

struct NormResult {
  double value = 0.0;
  // One unit vector per grouped axis; contracting the unfolding with these
  // reproduces value.
  std::vector<std::vector<double>> certificate;
  std::string method;  // frobenius | spectral | als
  int restarts_used = 0;
  int iterations = 0;
  bool converged = true;
  double residual = 0.0;
};

// sup of the multilinear form of the unfolding of a by p over unit vectors.
// k=1 and k=2 are exact (Frobenius norm, top singular value); k>=3 is the
// best value over multi-start alternating maximization and is a certified
// lower bound on the true supremum.
NormResult partition_norm(const Tensor& a, const Partition& p,
                          const SolverConfig& cfg = {});

// Independent brute-force route for small tensors: deterministic spherical
// grids on all axes but the last two, exact bipartite maximization (top
// singular value) on the final two. Accurate to O(resolution).
// Requires every dimension <= 4 and resolution in (0, 0.1].
double injective_norm_oracle(const Tensor& a, double resolution);

// The partition sets behind s_k: all of S(k,d) for k <= d-2, and for
// k = d-1 the d-1 partitions pairing one j <= d-1 with d, singletons
// elsewhere.
std::vector<Partition> s_k_partitions(int d, int k);

// Sum of partition norms over s_k_partitions(order, k).
double s_k(const Tensor& a, int k, const SolverConfig& cfg = {});

std::string norm_result_to_json(const NormResult& r);

}  // namespace gchaos
