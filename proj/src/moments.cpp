#include "gchaos/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gchaos {

double NormTable::value(const Partition& p) const {
  Partition canon = make_partition(p.blocks, p.ground_size);
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    if (partitions[i] == canon) return results[i].value;
  }
  throw std::invalid_argument("norm table does not contain the partition");
}

double NormTable::frobenius() const {
  std::vector<int> all;
  for (int e = 1; e <= order; ++e) all.push_back(e);
  return value(make_partition({all}, order));
}

double NormTable::injective() const {
  std::vector<std::vector<int>> singles;
  for (int e = 1; e <= order; ++e) singles.push_back({e});
  return value(make_partition(std::move(singles), order));
}

bool NormTable::all_converged() const {
  for (const auto& r : results) {
    if (!r.converged) return false;
  }
  return true;
}

NormTable compute_norm_table(const Tensor& a, const SolverConfig& cfg) {
  NormTable table;
  table.order = a.order();
  table.partitions = enumerate_all_partitions(a.order());
  table.results.reserve(table.partitions.size());
  for (const auto& p : table.partitions) {
    table.results.push_back(partition_norm(a, p, cfg));
  }
  return table;
}

double moment_functional(const NormTable& table, double p) {
  if (p < 1.0) {
    throw std::invalid_argument("moment functional requires p >= 1");
  }
  if (table.partitions.empty()) {
    throw std::invalid_argument("norm table is empty");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < table.partitions.size(); ++i) {
    double k = static_cast<double>(table.partitions[i].block_count());
    sum += std::pow(p, k / 2.0) * table.results[i].value;
  }
  return sum;
}

MomentProfile moment_profile(const NormTable& table,
                             const std::vector<double>& p_grid) {
  MomentProfile profile;
  profile.p_grid = p_grid;
  for (double p : p_grid) {
    if (p < 1.0) {
      throw std::invalid_argument("moment functional requires p >= 1");
    }
    std::vector<MomentContribution> contribs;
    double total = 0.0;
    for (std::size_t i = 0; i < table.partitions.size(); ++i) {
      double k = static_cast<double>(table.partitions[i].block_count());
      double term = std::pow(p, k / 2.0) * table.results[i].value;
      total += term;
      contribs.push_back({table.partitions[i], term});
    }
    profile.values.push_back(total);
    profile.contributions.push_back(std::move(contribs));
  }
  return profile;
}

TailExponentResult tail_exponent(const NormTable& table, double t) {
  if (t < 0.0) {
    throw std::invalid_argument("tail exponent requires t >= 0");
  }
  bool any = false;
  TailExponentResult best;
  for (std::size_t i = 0; i < table.partitions.size(); ++i) {
    double norm = table.results[i].value;
    if (norm <= 0.0) continue;  // vanishing contribution, infinite exponent
    double k = static_cast<double>(table.partitions[i].block_count());
    double e = std::pow(t / norm, 2.0 / k);
    if (!any || e < best.value) {
      best.value = e;
      best.witness = table.partitions[i];
      any = true;
    }
  }
  if (!any) {
    throw std::domain_error(
        "tail exponent undefined for the zero tensor (tail probability is 0)");
  }
  return best;
}

TailEnvelope tail_envelope(const NormTable& table,
                           const std::vector<double>& t_grid, double c_u,
                           double c_l) {
  if (c_u <= 0.0 || c_l <= 0.0) {
    throw std::invalid_argument("envelope constants must be positive");
  }
  TailEnvelope env;
  env.t_grid = t_grid;
  env.c_upper = c_u;
  env.c_lower = c_l;
  for (double t : t_grid) {
    TailExponentResult e = tail_exponent(table, t);
    env.exponent.push_back(e.value);
    env.witness.push_back(e.witness);
    env.upper.push_back(std::min(1.0, c_u * std::exp(-e.value / c_u)));
    env.lower.push_back(std::exp(-c_l * e.value) / c_l);
  }
  return env;
}

double gaussian_abs_moment(double p) {
  if (p <= 0.0) {
    throw std::invalid_argument("gaussian_abs_moment requires p > 0");
  }
  // E|g|^p = 2^(p/2) * Gamma((p+1)/2) / Gamma(1/2)
  double log_moment = 0.5 * p * std::log(2.0) + std::lgamma((p + 1.0) / 2.0) -
                      std::lgamma(0.5);
  return std::exp(log_moment / p);
}

double conjecture_rhs(const NormTable& table) {
  int d = table.order;
  if (d < 2) {
    throw std::invalid_argument("conjecture_rhs requires order >= 2");
  }
  double inj = table.injective();
  double frob = table.frobenius();
  double cross = std::pow(inj, static_cast<double>(d - 2) / (d - 1)) *
                 std::pow(frob, 1.0 / (d - 1));
  return s_k_from_table(table, d - 1) + cross;
}

double s_k_from_table(const NormTable& table, int k) {
  double sum = 0.0;
  for (const auto& p : s_k_partitions(table.order, k)) {
    sum += table.value(p);
  }
  return sum;
}

}  // namespace gchaos
