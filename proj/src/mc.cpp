#include "gchaos/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gchaos/rng.hpp"

namespace gchaos {

namespace {

constexpr double kZ95 = 1.959963984540054;

// Evaluates the chaos by successive single-axis contractions, last axis
// first; scratch buffers alternate so cost stays O(prod n_j) per sample.
double chaos_value(const Tensor& a, const std::vector<std::vector<double>>& g,
                   std::vector<double>& buf_a, std::vector<double>& buf_b) {
  const std::vector<double>* cur = &a.data();
  std::size_t len = a.size();
  for (int axis = a.order() - 1; axis >= 1; --axis) {
    const auto& v = g[static_cast<std::size_t>(axis)];
    std::size_t nd = v.size();
    std::size_t outlen = len / nd;
    std::vector<double>& dst = (axis % 2 == 0) ? buf_a : buf_b;
    dst.resize(outlen);
    for (std::size_t i = 0; i < outlen; ++i) {
      const double* row = cur->data() + i * nd;
      double s = 0.0;
      for (std::size_t j = 0; j < nd; ++j) s += row[j] * v[j];
      dst[i] = s;
    }
    cur = &dst;
    len = outlen;
  }
  const auto& v0 = g[0];
  double s = 0.0;
  for (std::size_t i = 0; i < len; ++i) s += (*cur)[i] * v0[i];
  return s;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  double pos = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = static_cast<std::size_t>(std::ceil(pos));
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<double> sample_decoupled(const Tensor& a, std::size_t n,
                                     std::uint64_t seed, int threads) {
  if (n < 1) {
    throw std::invalid_argument("sample count must be at least 1");
  }
  std::vector<double> out(n, 0.0);
  std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    GaussianStream stream(substream_seed(seed, kRoleSampling, c));
    std::vector<std::vector<double>> g;
    for (int dim : a.shape()) {
      g.emplace_back(static_cast<std::size_t>(dim));
    }
    std::vector<double> buf_a, buf_b;
    std::size_t begin = c * kSampleChunk;
    std::size_t end = std::min(n, begin + kSampleChunk);
    for (std::size_t s = begin; s < end; ++s) {
      for (auto& v : g) stream.fill(v);
      out[s] = chaos_value(a, g, buf_a, buf_b);
    }
  });
  return out;
}

std::vector<double> sample_coupled(const Tensor& a, std::size_t n,
                                   std::uint64_t seed, int threads) {
  if (n < 1) {
    throw std::invalid_argument("sample count must be at least 1");
  }
  const auto& shape = a.shape();
  for (int dim : shape) {
    if (dim != shape[0]) {
      throw std::invalid_argument(
          "coupled sampling requires equal axis lengths");
    }
  }
  // Support check plus a compact nonzero list for evaluation.
  struct Term {
    double coeff;
    std::vector<int> index;
  };
  std::vector<Term> terms;
  std::vector<int> idx(shape.size(), 0);
  for (std::size_t flat = 0; flat < a.size(); ++flat) {
    double v = a.data()[flat];
    if (v != 0.0) {
      for (std::size_t j = 1; j < idx.size(); ++j) {
        if (idx[j] <= idx[j - 1]) {
          throw std::invalid_argument(
              "coupled sampling: support violation, nonzero entry off the "
              "strictly increasing multi-indices");
        }
      }
      terms.push_back({v, idx});
    }
    for (int j = static_cast<int>(idx.size()) - 1; j >= 0; --j) {
      auto ju = static_cast<std::size_t>(j);
      if (++idx[ju] < shape[ju]) break;
      idx[ju] = 0;
    }
  }

  std::vector<double> out(n, 0.0);
  std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    GaussianStream stream(substream_seed(seed, kRoleSampling, c));
    std::vector<double> g(static_cast<std::size_t>(shape[0]));
    std::size_t begin = c * kSampleChunk;
    std::size_t end = std::min(n, begin + kSampleChunk);
    for (std::size_t s = begin; s < end; ++s) {
      stream.fill(g);
      double total = 0.0;
      for (const auto& term : terms) {
        double prod = term.coeff;
        for (int i : term.index) prod *= g[static_cast<std::size_t>(i)];
        total += prod;
      }
      out[s] = total;
    }
  });
  return out;
}

std::vector<PnormEstimate> empirical_pnorm(std::span<const double> samples,
                                           const std::vector<double>& p_grid,
                                           std::uint64_t seed, int resamples) {
  if (samples.empty()) {
    throw std::invalid_argument("empirical p-norm needs samples");
  }
  for (double p : p_grid) {
    if (p < 1.0) {
      throw std::invalid_argument("empirical p-norm requires p >= 1");
    }
  }
  std::size_t n = samples.size();
  double maxabs = 0.0;
  for (double s : samples) maxabs = std::max(maxabs, std::abs(s));

  std::vector<PnormEstimate> out;
  if (maxabs == 0.0) {
    for (double p : p_grid) {
      PnormEstimate e;
      e.p = p;
      e.degenerate = true;
      out.push_back(e);
    }
    return out;
  }

  // Scaled powers (|s|/max)^p never overflow; the estimate rescales by max.
  std::vector<std::vector<double>> weights;
  for (double p : p_grid) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
      double r = std::abs(samples[i]) / maxabs;
      w[i] = r > 0.0 ? std::exp(p * std::log(r)) : 0.0;
    }
    weights.push_back(std::move(w));
  }

  std::vector<std::vector<double>> boot(
      p_grid.size(), std::vector<double>(static_cast<std::size_t>(resamples)));
  for (int b = 0; b < resamples; ++b) {
    GaussianStream eng(substream_seed(seed, kRoleBootstrap,
                                      static_cast<std::uint64_t>(b)));
    std::vector<double> sums(p_grid.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      auto pick = static_cast<std::size_t>(eng.uniform01() *
                                           static_cast<double>(n));
      if (pick >= n) pick = n - 1;
      for (std::size_t q = 0; q < p_grid.size(); ++q) {
        sums[q] += weights[q][pick];
      }
    }
    for (std::size_t q = 0; q < p_grid.size(); ++q) {
      boot[q][static_cast<std::size_t>(b)] =
          maxabs *
          std::pow(sums[q] / static_cast<double>(n), 1.0 / p_grid[q]);
    }
  }

  for (std::size_t q = 0; q < p_grid.size(); ++q) {
    PnormEstimate e;
    e.p = p_grid[q];
    double sum = 0.0;
    double top = 0.0;
    for (double w : weights[q]) {
      sum += w;
      top = std::max(top, w);
    }
    e.value = maxabs * std::pow(sum / static_cast<double>(n), 1.0 / e.p);
    e.conditioning_warning = top > 0.5 * sum;
    std::vector<double> sorted = boot[q];
    std::sort(sorted.begin(), sorted.end());
    e.lo = quantile_sorted(sorted, 0.025);
    e.hi = quantile_sorted(sorted, 0.975);
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= static_cast<double>(sorted.size());
    double var = 0.0;
    for (double v : sorted) var += (v - mean) * (v - mean);
    e.se = std::sqrt(var / static_cast<double>(sorted.size()));
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<TailPoint> empirical_tail(std::span<const double> samples,
                                      const std::vector<double>& t_grid) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (t_grid[i] < 0.0 || (i > 0 && t_grid[i] < t_grid[i - 1])) {
      throw std::invalid_argument("tail grid must be nonnegative ascending");
    }
  }
  std::vector<double> absd(samples.begin(), samples.end());
  for (double& v : absd) v = std::abs(v);
  std::sort(absd.begin(), absd.end());
  auto n = static_cast<double>(absd.size());

  std::vector<TailPoint> out;
  for (double t : t_grid) {
    auto it = std::lower_bound(absd.begin(), absd.end(), t);
    std::size_t count = static_cast<std::size_t>(absd.end() - it);
    double phat = static_cast<double>(count) / n;
    double z2 = kZ95 * kZ95;
    double denom = 1.0 + z2 / n;
    double center = (phat + z2 / (2.0 * n)) / denom;
    double half =
        kZ95 *
        std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    out.push_back({t, phat, std::max(0.0, center - half),
                   std::min(1.0, center + half), count});
  }
  return out;
}

ExpectedNormEstimate expected_contracted_norm(
    const Tensor& a, const std::vector<int>& contracted,
    const Partition& residual_partition, std::size_t draws, std::uint64_t seed,
    const SolverConfig& cfg, int threads) {
  if (draws < 1) {
    throw std::invalid_argument("expected norm needs at least one draw");
  }
  if (contracted.empty()) {
    throw std::invalid_argument("expected norm needs contracted axes");
  }
  std::vector<int> axes = contracted;  // 1-based
  std::sort(axes.begin(), axes.end());
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (axes[i] < 1 || axes[i] > a.order() ||
        (i > 0 && axes[i] == axes[i - 1])) {
      throw std::invalid_argument("expected norm: bad contracted axis set");
    }
  }
  bool full = axes.size() == static_cast<std::size_t>(a.order());
  int residual_order = a.order() - static_cast<int>(axes.size());
  if (!full && residual_partition.ground_size != residual_order) {
    throw std::invalid_argument(
        "residual partition does not match the residual order");
  }
  std::vector<int> axes0;
  for (int e : axes) axes0.push_back(e - 1);

  ExpectedNormEstimate est;
  est.draws = draws;
  est.values.assign(draws, 0.0);
  std::vector<int> unconverged(draws, 0);
  parallel_for(draws, threads, [&](std::size_t m) {
    GaussianStream stream(substream_seed(seed, kRoleContraction, m));
    std::vector<std::vector<double>> g;
    for (int axis : axes0) {
      std::vector<double> v(
          static_cast<std::size_t>(a.shape()[static_cast<std::size_t>(axis)]));
      stream.fill(v);
      g.push_back(std::move(v));
    }
    if (full) {
      est.values[m] = std::abs(multilinear_value(a, g));
    } else {
      Tensor residual = contract_block(a, axes0, g);
      NormResult r = partition_norm(residual, residual_partition, cfg);
      est.values[m] = r.value;
      if (!r.converged) unconverged[m] = 1;
    }
  });
  for (int u : unconverged) est.unconverged += u;

  double mean = 0.0;
  for (double v : est.values) mean += v;
  mean /= static_cast<double>(draws);
  double var = 0.0;
  for (double v : est.values) var += (v - mean) * (v - mean);
  var /= std::max<double>(1.0, static_cast<double>(draws - 1));
  double half = kZ95 * std::sqrt(var / static_cast<double>(draws));
  est.mean = mean;
  est.lo = mean - half;
  est.hi = mean + half;
  return est;
}

}  // namespace gchaos
