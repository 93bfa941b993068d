#pragma once

#include <vector>

#include "gchaos/norms.hpp"
#include "gchaos/partition.hpp"
#include "gchaos/tensor.hpp"

namespace gchaos {

// Cached partition norms for every partition of {1,...,d}, in enumeration
// order (k ascending, then lexicographic).
struct NormTable {
  int order = 0;
  std::vector<Partition> partitions;
  std::vector<NormResult> results;

  double value(const Partition& p) const;
  double frobenius() const;  // single-block partition norm
  double injective() const;  // all-singletons partition norm
  bool all_converged() const;
};

NormTable compute_norm_table(const Tensor& a, const SolverConfig& cfg = {});

// m_p(A): sum over k of p^(k/2) times the sum of partition norms with k
// blocks. Requires p >= 1. (The moment sandwich itself is stated for p >= 2;
// p in [1,2) is accepted because the expected-norm bound uses it.)
double moment_functional(const NormTable& table, double p);

struct MomentContribution {
  Partition partition;
  double term;  // p^(k/2) * norm
};

struct MomentProfile {
  std::vector<double> p_grid;
  std::vector<double> values;
  std::vector<std::vector<MomentContribution>> contributions;
};

MomentProfile moment_profile(const NormTable& table,
                             const std::vector<double>& p_grid);

struct TailExponentResult {
  double value = 0.0;
  Partition witness;
};

// min over partitions with nonzero norm of (t / norm)^(2/k); ties broken by
// canonical partition order. Throws std::domain_error when every norm is 0.
TailExponentResult tail_exponent(const NormTable& table, double t);

struct TailEnvelope {
  std::vector<double> t_grid;
  std::vector<double> exponent;
  std::vector<Partition> witness;
  std::vector<double> upper;  // min(1, c_u * exp(-E/c_u))
  std::vector<double> lower;  // (1/c_l) * exp(-c_l * E)
  double c_upper = 1.0;
  double c_lower = 1.0;
};

TailEnvelope tail_envelope(const NormTable& table,
                           const std::vector<double>& t_grid, double c_u,
                           double c_l);

// p-th absolute moment of a standard normal, (E|g|^p)^(1/p), via log-Gamma.
double gaussian_abs_moment(double p);

// s_{d-1}(A) + injective^((d-2)/(d-1)) * Frobenius^(1/(d-1)), the
// constant-free right side of the conjectured sharper expected-norm bound.
double conjecture_rhs(const NormTable& table);

// Sum of partition norms over s_k_partitions(order, k), read from the table.
double s_k_from_table(const NormTable& table, int k);

}  // namespace gchaos
