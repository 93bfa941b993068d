#include "gchaos/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "gchaos/rng.hpp"
#include "json.hpp"

namespace gchaos {

namespace {

Tensor gaussian_iid_tensor(const std::vector<int>& shape,
                           GaussianStream& stream) {
  Tensor z = Tensor::zeros(shape);
  std::vector<double> data(z.size());
  stream.fill(data);
  return Tensor(shape, std::move(data));
}

Tensor rank_one_tensor(const std::vector<int>& shape, GaussianStream& stream) {
  std::vector<std::vector<double>> factors;
  for (int n : shape) {
    std::vector<double> v(static_cast<std::size_t>(n));
    stream.fill(v);
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) {
      v.assign(v.size(), 0.0);
      v[0] = 1.0;
    } else {
      for (double& x : v) x /= nrm;
    }
    factors.push_back(std::move(v));
  }
  Tensor z = Tensor::zeros(shape);
  std::vector<double> data(z.size());
  std::vector<int> idx(shape.size(), 0);
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    double prod = 1.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      prod *= factors[j][static_cast<std::size_t>(idx[j])];
    }
    data[flat] = prod;
    for (int j = static_cast<int>(idx.size()) - 1; j >= 0; --j) {
      auto ju = static_cast<std::size_t>(j);
      if (++idx[ju] < shape[ju]) break;
      idx[ju] = 0;
    }
  }
  return Tensor(shape, std::move(data));
}

Tensor diagonal_tensor(const std::vector<int>& shape) {
  for (int n : shape) {
    if (n != shape[0]) {
      throw std::invalid_argument("diagonal family requires equal dimensions");
    }
  }
  Tensor z = Tensor::zeros(shape);
  std::vector<double> data(z.size(), 0.0);
  std::size_t stride_sum = 0;
  std::size_t stride = 1;
  for (std::size_t j = shape.size(); j-- > 0;) {
    stride_sum += stride;
    stride *= static_cast<std::size_t>(shape[j]);
  }
  for (int i = 0; i < shape[0]; ++i) {
    data[static_cast<std::size_t>(i) * stride_sum] = 1.0;
  }
  return Tensor(shape, std::move(data));
}

Tensor sparse_tensor(const std::vector<int>& shape, double sparsity,
                     GaussianStream& stream) {
  Tensor z = Tensor::zeros(shape);
  std::vector<double> data(z.size());
  stream.fill(data);
  double sum = 0.0;
  for (double& v : data) {
    if (stream.uniform01() >= sparsity) v = 0.0;
    sum += v * v;
  }
  if (sum > 0.0) {
    double scale = 1.0 / std::sqrt(sum);
    for (double& v : data) v *= scale;
  }
  return Tensor(shape, std::move(data));
}

}  // namespace

std::vector<Tensor> generate_family(const FamilySpec& spec) {
  if (spec.kind == "user-file") {
    return {load_tensor_json(spec.path)};
  }
  if (spec.count < 1) {
    throw std::invalid_argument("family count must be at least 1");
  }
  std::vector<Tensor> out;
  for (int t = 0; t < spec.count; ++t) {
    GaussianStream stream(substream_seed(spec.seed, kRoleFamily,
                                         static_cast<std::uint64_t>(t)));
    if (spec.kind == "gaussian-iid") {
      out.push_back(gaussian_iid_tensor(spec.shape, stream));
    } else if (spec.kind == "rank-one") {
      out.push_back(rank_one_tensor(spec.shape, stream));
    } else if (spec.kind == "diagonal") {
      out.push_back(diagonal_tensor(spec.shape));
    } else if (spec.kind == "sparse") {
      out.push_back(sparse_tensor(spec.shape, spec.sparsity, stream));
    } else {
      throw std::invalid_argument("unknown family kind: " + spec.kind);
    }
  }
  return out;
}

std::string shape_string(const std::vector<int>& shape) {
  std::ostringstream os;
  for (std::size_t j = 0; j < shape.size(); ++j) {
    if (j > 0) os << 'x';
    os << shape[j];
  }
  return os.str();
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// ---- sandwich ---------------------------------------------------------------

SandwichReport verify_sandwich(const std::vector<FamilySpec>& families,
                               const SandwichOptions& opts) {
  SandwichReport report;
  report.bracket_lo = opts.bracket_lo;
  report.bracket_hi = opts.bracket_hi;
  int tensor_index = 0;
  for (const auto& spec : families) {
    for (const Tensor& a : generate_family(spec)) {
      SandwichRow base;
      base.tensor_index = tensor_index;
      base.kind = spec.kind;
      base.d = a.order();
      base.shape = shape_string(a.shape());
      base.seed = opts.seed;
      base.samples = opts.samples;

      if (a.frobenius() == 0.0) {
        SandwichRow row = base;
        row.flag = "degenerate";
        report.rows.push_back(std::move(row));
        ++tensor_index;
        continue;
      }

      NormTable table = compute_norm_table(a, opts.solver);
      bool converged = table.all_converged();
      std::vector<double> samples = sample_decoupled(
          a, opts.samples,
          substream_seed(opts.seed, kRoleSampling,
                         static_cast<std::uint64_t>(tensor_index)),
          opts.threads);
      auto pnorms = empirical_pnorm(
          samples, opts.p_grid,
          substream_seed(opts.seed, kRoleBootstrap,
                         static_cast<std::uint64_t>(tensor_index)));

      for (std::size_t q = 0; q < opts.p_grid.size(); ++q) {
        SandwichRow row = base;
        row.p = opts.p_grid[q];
        row.mp = moment_functional(table, row.p);
        row.pnorm = pnorms[q].value;
        row.pnorm_lo = pnorms[q].lo;
        row.pnorm_hi = pnorms[q].hi;
        row.ratio = row.pnorm / row.mp;
        row.ratio_lo = row.pnorm_lo / row.mp;
        row.ratio_hi = row.pnorm_hi / row.mp;
        if (!converged) {
          row.flag = "unconverged";
        } else if (pnorms[q].conditioning_warning) {
          row.flag = "warn-conditioning";
        } else {
          row.flag = "ok";
        }
        if (row.flag != "unconverged") {
          auto it = report.fitted.find(row.d);
          if (it == report.fitted.end()) {
            report.fitted[row.d] = {row.ratio, row.ratio};
          } else {
            it->second.first = std::min(it->second.first, row.ratio);
            it->second.second = std::max(it->second.second, row.ratio);
          }
          bool excluded = row.ratio_hi < opts.bracket_lo ||
                          row.ratio_lo > opts.bracket_hi;
          if (excluded) report.pass = false;
        }
        report.rows.push_back(std::move(row));
      }
      ++tensor_index;
    }
  }
  return report;
}

// ---- tail ---------------------------------------------------------------

namespace {

// Smallest c > 0 with min(1, c e^{-E/c}) >= phat at every informative point;
// the left side is nondecreasing in c, so bisection applies.
double fit_upper_constant(const std::vector<double>& exponents,
                          const std::vector<double>& phats) {
  auto dominates = [&](double c) {
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      double env = std::min(1.0, c * std::exp(-exponents[i] / c));
      if (env < phats[i]) return false;
    }
    return true;
  };
  double hi = 1.0;
  while (!dominates(hi)) {
    hi *= 2.0;
    if (hi > 1e12) return hi;
  }
  double lo = 1e-9;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (dominates(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Smallest c > 0 with (1/c) e^{-cE} <= phat everywhere informative; the left
// side is decreasing in c.
double fit_lower_constant(const std::vector<double>& exponents,
                          const std::vector<double>& phats) {
  auto stays_below = [&](double c) {
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      if (std::exp(-c * exponents[i]) / c > phats[i]) return false;
    }
    return true;
  };
  double hi = 1.0;
  while (!stays_below(hi)) {
    hi *= 2.0;
    if (hi > 1e12) return hi;
  }
  double lo = 1e-9;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (stays_below(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

TailReport verify_tail(const std::vector<FamilySpec>& families,
                       const TailOptions& opts) {
  TailReport report;
  int tensor_index = 0;
  for (const auto& spec : families) {
    for (const Tensor& a : generate_family(spec)) {
      TailFit fit;
      fit.tensor_index = tensor_index;
      fit.kind = spec.kind;

      if (a.frobenius() == 0.0) {
        fit.flag = "degenerate";
        report.fits.push_back(std::move(fit));
        ++tensor_index;
        continue;
      }

      NormTable table = compute_norm_table(a, opts.solver);
      TailEnvelope env = tail_envelope(table, opts.t_grid, opts.c_u, opts.c_l);
      std::vector<double> samples = sample_decoupled(
          a, opts.samples,
          substream_seed(opts.seed, kRoleSampling,
                         static_cast<std::uint64_t>(tensor_index)),
          opts.threads);
      auto tail = empirical_tail(samples, opts.t_grid);

      std::vector<double> fit_exponents;
      std::vector<double> fit_phats;
      for (std::size_t i = 0; i < opts.t_grid.size(); ++i) {
        TailRow row;
        row.tensor_index = tensor_index;
        row.kind = spec.kind;
        row.seed = opts.seed;
        row.samples = opts.samples;
        row.t = opts.t_grid[i];
        row.exponent = env.exponent[i];
        row.witness = format_partition(env.witness[i]);
        row.phat = tail[i].phat;
        row.phat_lo = tail[i].lo;
        row.phat_hi = tail[i].hi;
        row.upper = env.upper[i];
        row.lower = env.lower[i];
        row.informative = tail[i].count >= opts.min_tail_count;
        if (row.informative) {
          fit_exponents.push_back(row.exponent);
          fit_phats.push_back(row.phat);
        }
        report.rows.push_back(std::move(row));
      }

      if (fit_exponents.empty()) {
        fit.flag = "uninformative";
      } else {
        fit.fitted_cu = fit_upper_constant(fit_exponents, fit_phats);
        fit.fitted_cl = fit_lower_constant(fit_exponents, fit_phats);
        fit.finite = std::isfinite(fit.fitted_cu) && fit.fitted_cu <= 1e12 &&
                     std::isfinite(fit.fitted_cl) && fit.fitted_cl <= 1e12;
        fit.flag = fit.finite ? "ok" : "unbounded";
        if (!fit.finite) report.pass = false;
        if (opts.max_fitted_cu > 0.0 && fit.fitted_cu > opts.max_fitted_cu) {
          report.pass = false;
        }
      }
      report.fits.push_back(std::move(fit));
      ++tensor_index;
    }
  }
  return report;
}

// ---- theorem 2 ---------------------------------------------------------------

namespace {

Partition singleton_partition(int d) {
  std::vector<std::vector<int>> blocks;
  for (int e = 1; e <= d; ++e) blocks.push_back({e});
  return make_partition(std::move(blocks), d);
}

}  // namespace

Thm2Report verify_thm2(const std::vector<FamilySpec>& families,
                       const Thm2Options& opts) {
  Thm2Report report;
  report.bound_factor = opts.bound_factor;
  int tensor_index = 0;
  for (const auto& spec : families) {
    for (const Tensor& a : generate_family(spec)) {
      if (a.order() < 2) {
        throw std::invalid_argument("theorem-2 check requires order >= 2");
      }
      Thm2Row row;
      row.tensor_index = tensor_index;
      row.kind = spec.kind;
      row.d = a.order();
      row.shape = shape_string(a.shape());
      row.seed = opts.seed;
      row.draws = opts.draws;

      if (a.frobenius() == 0.0) {
        row.flag = "degenerate";
        report.rows.push_back(std::move(row));
        ++tensor_index;
        continue;
      }

      NormTable table = compute_norm_table(a, opts.solver);
      int d = a.order();
      double rhs_min = 0.0;
      double argmin_p = 0.0;
      for (double p : opts.p_grid) {
        double rhs = std::pow(p, 0.5 * (1.0 - d)) * moment_functional(table, p);
        if (argmin_p == 0.0 || rhs < rhs_min) {
          rhs_min = rhs;
          argmin_p = p;
        }
      }

      ExpectedNormEstimate est = expected_contracted_norm(
          a, {d}, singleton_partition(d - 1), opts.draws,
          substream_seed(opts.seed, kRoleContraction,
                         static_cast<std::uint64_t>(tensor_index)),
          opts.solver, opts.threads);

      row.lhs = est.mean;
      row.lhs_lo = est.lo;
      row.lhs_hi = est.hi;
      row.rhs_min = rhs_min;
      row.rhs_argmin_p = argmin_p;
      row.ratio = rhs_min > 0.0 ? est.mean / rhs_min : 0.0;
      row.flag = est.unconverged > 0 ? "unconverged" : "ok";
      if (row.flag == "ok") {
        report.fitted_constant = std::max(report.fitted_constant, row.ratio);
        if (est.lo > opts.bound_factor * rhs_min) report.pass = false;
      }
      report.rows.push_back(std::move(row));
      ++tensor_index;
    }
  }
  return report;
}

// ---- conjecture probe ---------------------------------------------------------

ConjectureReport probe_conjecture(const std::vector<FamilySpec>& families,
                                  const ConjectureOptions& opts) {
  ConjectureReport report;
  int tensor_index = 0;
  for (const auto& spec : families) {
    for (const Tensor& a : generate_family(spec)) {
      if (a.order() < 2) {
        throw std::invalid_argument("conjecture probe requires order >= 2");
      }
      ConjectureRow row;
      row.tensor_index = tensor_index;
      row.kind = spec.kind;
      row.d = a.order();
      row.shape = shape_string(a.shape());
      row.seed = opts.seed;
      row.draws = opts.draws;

      if (a.frobenius() == 0.0) {
        row.flag = "degenerate";
        report.rows.push_back(std::move(row));
        ++tensor_index;
        continue;
      }

      NormTable table = compute_norm_table(a, opts.solver);
      int d = a.order();
      ExpectedNormEstimate est = expected_contracted_norm(
          a, {d}, singleton_partition(d - 1), opts.draws,
          substream_seed(opts.seed, kRoleContraction,
                         static_cast<std::uint64_t>(tensor_index)),
          opts.solver, opts.threads);
      row.lhs = est.mean;
      row.lhs_lo = est.lo;
      row.lhs_hi = est.hi;
      row.rhs = conjecture_rhs(table);
      row.ratio = row.rhs > 0.0 ? row.lhs / row.rhs : 0.0;
      row.flag = "ok";
      report.rows.push_back(std::move(row));
      ++tensor_index;
    }
  }
  return report;
}

// ---- serialization ---------------------------------------------------------

namespace {

void csv_line(std::ostringstream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) os << ',';
    os << cells[i];
  }
  os << '\n';
}

}  // namespace

std::string sandwich_csv(const SandwichReport& r) {
  std::ostringstream os;
  csv_line(os, {"tensor", "kind", "d", "shape", "seed", "samples", "p", "m_p",
                "pnorm", "pnorm_lo", "pnorm_hi", "ratio", "ratio_lo",
                "ratio_hi", "flag"});
  for (const auto& row : r.rows) {
    csv_line(os, {std::to_string(row.tensor_index), row.kind,
                  std::to_string(row.d), row.shape, std::to_string(row.seed),
                  std::to_string(row.samples), format_number(row.p),
                  format_number(row.mp), format_number(row.pnorm),
                  format_number(row.pnorm_lo), format_number(row.pnorm_hi),
                  format_number(row.ratio), format_number(row.ratio_lo),
                  format_number(row.ratio_hi), row.flag});
  }
  return os.str();
}

std::string tail_csv(const TailReport& r) {
  std::ostringstream os;
  csv_line(os, {"tensor", "kind", "seed", "samples", "t", "exponent",
                "witness", "phat", "phat_lo", "phat_hi", "upper", "lower",
                "informative"});
  for (const auto& row : r.rows) {
    csv_line(os,
             {std::to_string(row.tensor_index), row.kind,
              std::to_string(row.seed), std::to_string(row.samples),
              format_number(row.t), format_number(row.exponent),
              "\"" + row.witness + "\"", format_number(row.phat),
              format_number(row.phat_lo), format_number(row.phat_hi),
              format_number(row.upper), format_number(row.lower),
              row.informative ? "1" : "0"});
  }
  csv_line(os, {"tensor", "kind", "fitted_cu", "fitted_cl", "flag", "", "", "",
                "", "", "", "", ""});
  for (const auto& fit : r.fits) {
    csv_line(os, {std::to_string(fit.tensor_index), fit.kind,
                  format_number(fit.fitted_cu), format_number(fit.fitted_cl),
                  fit.flag, "", "", "", "", "", "", "", ""});
  }
  return os.str();
}

std::string thm2_csv(const Thm2Report& r) {
  std::ostringstream os;
  csv_line(os, {"tensor", "kind", "d", "shape", "seed", "draws", "lhs",
                "lhs_lo", "lhs_hi", "rhs_min", "rhs_argmin_p", "ratio",
                "flag"});
  for (const auto& row : r.rows) {
    csv_line(os, {std::to_string(row.tensor_index), row.kind,
                  std::to_string(row.d), row.shape, std::to_string(row.seed),
                  std::to_string(row.draws), format_number(row.lhs),
                  format_number(row.lhs_lo), format_number(row.lhs_hi),
                  format_number(row.rhs_min), format_number(row.rhs_argmin_p),
                  format_number(row.ratio), row.flag});
  }
  return os.str();
}

std::string conjecture_csv(const ConjectureReport& r) {
  std::ostringstream os;
  csv_line(os, {"tensor", "kind", "d", "shape", "seed", "draws", "lhs",
                "lhs_lo", "lhs_hi", "rhs", "ratio", "flag"});
  for (const auto& row : r.rows) {
    csv_line(os, {std::to_string(row.tensor_index), row.kind,
                  std::to_string(row.d), row.shape, std::to_string(row.seed),
                  std::to_string(row.draws), format_number(row.lhs),
                  format_number(row.lhs_lo), format_number(row.lhs_hi),
                  format_number(row.rhs), format_number(row.ratio), row.flag});
  }
  return os.str();
}

namespace {

nlohmann::ordered_json solver_json(const SolverConfig& cfg) {
  return {{"restarts", cfg.restarts},
          {"max_iters", cfg.max_iters},
          {"tol", cfg.tol},
          {"seed", cfg.seed}};
}

}  // namespace

std::string sandwich_json(const SandwichReport& r, const SandwichOptions& o) {
  nlohmann::ordered_json j;
  j["config"] = {{"p_grid", o.p_grid},
                 {"samples", o.samples},
                 {"seed", o.seed},
                 {"bracket", {o.bracket_lo, o.bracket_hi}},
                 {"solver", solver_json(o.solver)}};
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"tensor", row.tensor_index},
                         {"kind", row.kind},
                         {"d", row.d},
                         {"shape", row.shape},
                         {"seed", row.seed},
                         {"samples", row.samples},
                         {"p", row.p},
                         {"m_p", row.mp},
                         {"pnorm", row.pnorm},
                         {"pnorm_lo", row.pnorm_lo},
                         {"pnorm_hi", row.pnorm_hi},
                         {"ratio", row.ratio},
                         {"ratio_lo", row.ratio_lo},
                         {"ratio_hi", row.ratio_hi},
                         {"flag", row.flag}});
  }
  j["fitted"] = nlohmann::json::array();
  for (const auto& [d, bounds] : r.fitted) {
    j["fitted"].push_back(
        {{"d", d}, {"c_lo", bounds.first}, {"c_hi", bounds.second}});
  }
  j["pass"] = r.pass;
  return j.dump(2);
}

std::string tail_json(const TailReport& r, const TailOptions& o) {
  nlohmann::ordered_json j;
  j["config"] = {{"t_grid", o.t_grid},     {"samples", o.samples},
                 {"seed", o.seed},         {"c_u", o.c_u},
                 {"c_l", o.c_l},           {"min_tail_count", o.min_tail_count},
                 {"solver", solver_json(o.solver)}};
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"tensor", row.tensor_index},
                         {"kind", row.kind},
                         {"t", row.t},
                         {"exponent", row.exponent},
                         {"witness", row.witness},
                         {"phat", row.phat},
                         {"phat_lo", row.phat_lo},
                         {"phat_hi", row.phat_hi},
                         {"upper", row.upper},
                         {"lower", row.lower},
                         {"informative", row.informative}});
  }
  j["fits"] = nlohmann::json::array();
  for (const auto& fit : r.fits) {
    j["fits"].push_back({{"tensor", fit.tensor_index},
                         {"kind", fit.kind},
                         {"fitted_cu", fit.fitted_cu},
                         {"fitted_cl", fit.fitted_cl},
                         {"flag", fit.flag}});
  }
  j["pass"] = r.pass;
  return j.dump(2);
}

std::string thm2_json(const Thm2Report& r, const Thm2Options& o) {
  nlohmann::ordered_json j;
  j["config"] = {{"p_grid", o.p_grid},
                 {"draws", o.draws},
                 {"seed", o.seed},
                 {"bound_factor", o.bound_factor},
                 {"solver", solver_json(o.solver)}};
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"tensor", row.tensor_index},
                         {"kind", row.kind},
                         {"d", row.d},
                         {"shape", row.shape},
                         {"lhs", row.lhs},
                         {"lhs_lo", row.lhs_lo},
                         {"lhs_hi", row.lhs_hi},
                         {"rhs_min", row.rhs_min},
                         {"rhs_argmin_p", row.rhs_argmin_p},
                         {"ratio", row.ratio},
                         {"flag", row.flag}});
  }
  j["fitted_constant"] = r.fitted_constant;
  j["pass"] = r.pass;
  return j.dump(2);
}

std::string conjecture_json(const ConjectureReport& r,
                            const ConjectureOptions& o) {
  nlohmann::ordered_json j;
  j["config"] = {{"draws", o.draws},
                 {"seed", o.seed},
                 {"solver", solver_json(o.solver)}};
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"tensor", row.tensor_index},
                         {"kind", row.kind},
                         {"d", row.d},
                         {"shape", row.shape},
                         {"lhs", row.lhs},
                         {"lhs_lo", row.lhs_lo},
                         {"lhs_hi", row.lhs_hi},
                         {"rhs", row.rhs},
                         {"ratio", row.ratio},
                         {"flag", row.flag}});
  }
  return j.dump(2);
}

}  // namespace gchaos
