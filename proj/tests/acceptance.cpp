// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Scales are chosen so the whole binary finishes well inside the
// ctest timeout on a laptop-class machine.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "gchaos/harness.hpp"
#include "gchaos/mc.hpp"
#include "gchaos/moments.hpp"
#include "gchaos/norms.hpp"
#include "gchaos/rng.hpp"
#include "gchaos/tensor.hpp"

using namespace gchaos;

namespace {

constexpr int kThreads = 4;

Tensor random_tensor(const std::vector<int>& shape, std::uint64_t seed) {
  Tensor z = Tensor::zeros(shape);
  std::vector<double> data(z.size());
  GaussianStream g(seed);
  g.fill(data);
  return Tensor(shape, std::move(data));
}

double jacobi_top_singular_value(const Tensor& m) {
  Eigen::MatrixXd mat(m.shape()[0], m.shape()[1]);
  for (int i = 0; i < m.shape()[0]; ++i)
    for (int j = 0; j < m.shape()[1]; ++j)
      mat(i, j) = m.data()[static_cast<std::size_t>(i) *
                               static_cast<std::size_t>(m.shape()[1]) +
                           static_cast<std::size_t>(j)];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
  return svd.singularValues()(0);
}

SolverConfig solver_with_threads() {
  SolverConfig cfg;
  cfg.threads = kThreads;
  return cfg;
}

// ---- criterion 1: norm-engine oracle equivalence ---------------------------

bool criterion_norm_oracles(std::string& detail) {
  SolverConfig cfg = solver_with_threads();
  double worst_abs = 0.0, worst_rel = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Tensor a = random_tensor({2, 2, 2}, 1000 + seed);
    double als = partition_norm(a, parse_partition("1|2|3", 3), cfg).value;
    double grid = injective_norm_oracle(a, 0.01);
    worst_abs = std::max(worst_abs, std::abs(als - grid));
    for (const auto& p : enumerate_partitions(3, 2)) {
      double spectral = partition_norm(a, p, cfg).value;
      double reference = jacobi_top_singular_value(unfold(a, p).tensor);
      double rel = std::abs(spectral - reference) / std::max(1e-300, reference);
      worst_rel = std::max(worst_rel, rel);
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max |als-grid| = %.3g (<= 0.02), max svd rel err = %.3g "
                "(<= 1e-8)",
                worst_abs, worst_rel);
  detail = buf;
  return worst_abs <= 0.02 && worst_rel <= 1e-8;
}

// ---- criterion 2: refinement monotonicity -----------------------------------

bool criterion_monotonicity(std::string& detail) {
  SolverConfig cfg = solver_with_threads();
  std::vector<std::vector<int>> shapes{{3, 4, 3}, {2, 3, 4}, {4, 4, 4},
                                       {2, 2, 3, 2}, {3, 2, 2, 3}};
  double worst_violation = 0.0;
  int checked = 0;
  for (int t = 0; t < 50; ++t) {
    const auto& shape = shapes[static_cast<std::size_t>(t) % shapes.size()];
    Tensor a = random_tensor(shape, 2000 + static_cast<std::uint64_t>(t));
    auto all = enumerate_all_partitions(static_cast<int>(shape.size()));
    std::vector<double> norms(all.size());
    for (std::size_t i = 0; i < all.size(); ++i)
      norms[i] = partition_norm(a, all[i], cfg).value;
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = 0; j < all.size(); ++j) {
        if (!refines(all[i], all[j])) continue;
        ++checked;
        worst_violation = std::max(worst_violation, norms[i] - norms[j]);
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "%d refinement pairs, worst excess = %.3g (<= 1e-8)", checked,
                worst_violation);
  detail = buf;
  return worst_violation <= 1e-8;
}

// ---- criterion 3: exact low-order forms -------------------------------------

bool criterion_exact_forms(std::string& detail) {
  SolverConfig cfg = solver_with_threads();
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Tensor v = random_tensor({6}, 3000 + seed);
    auto tv = compute_norm_table(v, cfg);
    Tensor m = random_tensor({4, 5}, 3100 + seed);
    auto tm = compute_norm_table(m, cfg);
    double hs = m.frobenius();
    double op = partition_norm(m, parse_partition("1|2", 2), cfg).value;
    for (double p : {2.0, 4.0, 8.0, 16.0}) {
      double rel1 = std::abs(moment_functional(tv, p) -
                             std::sqrt(p) * v.frobenius()) /
                    (std::sqrt(p) * v.frobenius());
      double rel2 =
          std::abs(moment_functional(tm, p) - (std::sqrt(p) * hs + p * op)) /
          (std::sqrt(p) * hs + p * op);
      worst = std::max({worst, rel1, rel2});
    }
  }

  double worst_doubling = 0.0;
  std::vector<std::vector<int>> shapes{{5}, {3, 4}, {3, 3, 3}, {2, 3, 2, 2}};
  for (const auto& shape : shapes) {
    Tensor a = random_tensor(shape, 3200 + shape.size());
    auto table = compute_norm_table(a, cfg);
    double cap = std::pow(2.0, 0.5 * static_cast<double>(shape.size()));
    for (double p : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      double excess = moment_functional(table, 2.0 * p) -
                      cap * moment_functional(table, p);
      worst_doubling =
          std::max(worst_doubling,
                   excess / (cap * moment_functional(table, p)));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "closed-form rel err = %.3g (<= 1e-10), doubling excess = "
                "%.3g (<= 1e-12)",
                worst, worst_doubling);
  detail = buf;
  return worst <= 1e-10 && worst_doubling <= 1e-12;
}

// ---- criterion 4: Monte Carlo calibration -----------------------------------

bool criterion_mc_calibration(std::string& detail) {
  Tensor a = make_tensor({2}, {3, 4});
  auto samples = sample_decoupled(a, 1000000, 4001, kThreads);
  auto est = empirical_pnorm(samples, {4.0}, 4002);
  double truth = 5.0 * std::pow(3.0, 0.25);
  double rel = std::abs(est[0].value - truth) / truth;

  // second-moment check: the empirical 2-norm squared should match the
  // squared Frobenius norm within four (delta-method) bootstrap SEs
  double worst_sigmas = 0.0;
  std::vector<std::vector<int>> shapes{{5}, {4, 5}, {3, 3, 4}, {2, 3, 2, 3}};
  for (const auto& shape : shapes) {
    Tensor t = random_tensor(shape, 4100 + shape.size());
    auto s = sample_decoupled(t, 400000, 4200 + shape.size(), kThreads);
    auto e = empirical_pnorm(s, {2.0}, 4300);
    double f2 = t.frobenius() * t.frobenius();
    double se2 = 2.0 * e[0].value * e[0].se;
    double sigmas = std::abs(e[0].value * e[0].value - f2) /
                    std::max(se2, 1e-300);
    worst_sigmas = std::max(worst_sigmas, sigmas);
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "|S|_4 rel err = %.3g (<= 0.01), second-moment deviation = "
                "%.2f SE (<= 4)",
                rel, worst_sigmas);
  detail = buf;
  return rel <= 0.01 && worst_sigmas <= 4.0;
}

// ---- criterion 5: moment sandwich -------------------------------------------

bool criterion_sandwich(std::string& detail) {
  std::vector<FamilySpec> fams{
      {"gaussian-iid", {5, 6}, 1, 51},   {"gaussian-iid", {4, 3, 4}, 1, 52},
      {"rank-one", {6, 5}, 1, 53},       {"rank-one", {4, 4, 4}, 1, 54},
      {"diagonal", {6, 6}, 1, 55},       {"diagonal", {5, 5, 5}, 1, 56},
  };
  SandwichOptions opts;
  opts.p_grid = {2.0, 4.0, 8.0, 16.0};
  opts.samples = 200000;
  opts.seed = 57;
  opts.solver = solver_with_threads();
  opts.threads = kThreads;
  auto report = verify_sandwich(fams, opts);
  double lo = 1e300, hi = 0.0;
  for (const auto& row : report.rows) {
    if (row.flag == "degenerate" || row.flag == "unconverged") continue;
    lo = std::min(lo, row.ratio);
    hi = std::max(hi, row.ratio);
  }
  bool has_fits = report.fitted.count(2) == 1 && report.fitted.count(3) == 1;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "ratios in [%.3g, %.3g] (within [0.05, 20]); fitted d=2 "
                "(%.3g, %.3g), d=3 (%.3g, %.3g)",
                lo, hi, report.fitted.count(2) ? report.fitted.at(2).first : 0,
                report.fitted.count(2) ? report.fitted.at(2).second : 0,
                report.fitted.count(3) ? report.fitted.at(3).first : 0,
                report.fitted.count(3) ? report.fitted.at(3).second : 0);
  detail = buf;
  return report.pass && has_fits && lo >= 0.05 && hi <= 20.0;
}

// ---- criterion 6: tail envelope ---------------------------------------------

bool criterion_tail_envelope(std::string& detail) {
  // order 1 and 2 families at scale; fitted upper constants must be small
  std::vector<FamilySpec> fams{{"gaussian-iid", {5}, 1, 61},
                               {"gaussian-iid", {3, 3}, 1, 62}};
  TailOptions opts;
  opts.t_grid.clear();
  for (int i = 0; i <= 16; ++i) opts.t_grid.push_back(0.25 * i);
  opts.samples = 1000000;
  opts.seed = 63;
  opts.solver = solver_with_threads();
  opts.threads = kThreads;
  auto report = verify_tail(fams, opts);
  double worst_cu = 0.0;
  bool all_finite = !report.fits.empty();
  for (const auto& fit : report.fits) {
    all_finite = all_finite && fit.finite;
    worst_cu = std::max(worst_cu, fit.fitted_cu);
  }

  // the unit scalar case: a single standard normal over t in [0, 3]
  const std::string path = "acceptance_unit_scalar.json";
  {
    std::ofstream out(path);
    out << tensor_to_json_text(make_tensor({1}, {1.0}));
  }
  std::vector<FamilySpec> unit{{"user-file", {}, 1, 64, 0.1, path}};
  TailOptions uopts;
  uopts.t_grid.clear();
  for (int i = 0; i <= 12; ++i) uopts.t_grid.push_back(0.25 * i);
  uopts.samples = 1000000;
  uopts.seed = 65;
  uopts.threads = kThreads;
  auto ureport = verify_tail(unit, uopts);
  std::remove(path.c_str());
  double unit_cu =
      ureport.fits.empty() ? 1e300 : ureport.fits.front().fitted_cu;

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "fitted c_u max = %.3g (<= 10), unit scalar c_u = %.3g (<= 2)",
                worst_cu, unit_cu);
  detail = buf;
  return all_finite && worst_cu <= 10.0 && unit_cu <= 2.0;
}

// ---- criterion 7: expected contracted norm ----------------------------------

bool criterion_expected_norm(std::string& detail) {
  std::vector<FamilySpec> fams{
      {"gaussian-iid", {4, 5}, 1, 71}, {"gaussian-iid", {3, 4, 3}, 1, 72},
      {"rank-one", {4, 4, 4}, 1, 73},  {"diagonal", {5, 5}, 1, 74},
  };
  Thm2Options opts;
  opts.draws = 500;
  opts.seed = 75;
  opts.solver = solver_with_threads();
  opts.threads = kThreads;
  auto report = verify_thm2(fams, opts);

  Tensor id = make_tensor({2, 2}, {1, 0, 0, 1});
  auto est = expected_contracted_norm(id, {2}, parse_partition("1", 1), 500,
                                      76, SolverConfig{}, kThreads);
  double truth = std::sqrt(3.14159265358979323846 / 2.0);
  double rel = std::abs(est.mean - truth) / truth;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "bound ratio max = %.3g (<= 20), identity estimate %.4f vs "
                "%.4f (rel err %.3g <= 0.02)",
                report.fitted_constant, est.mean, truth, rel);
  detail = buf;
  return report.pass && rel <= 0.02;
}

// ---- criterion 8: determinism -----------------------------------------------

bool criterion_determinism(std::string& detail) {
  std::vector<FamilySpec> fams{{"gaussian-iid", {3, 3}, 1, 81},
                               {"rank-one", {2, 2, 2}, 1, 82}};
  bool ok = true;

  SandwichOptions sw;
  sw.p_grid = {2.0, 4.0};
  sw.samples = 50000;
  sw.seed = 83;
  sw.threads = 1;
  auto s1 = sandwich_csv(verify_sandwich(fams, sw));
  sw.threads = 4;
  auto s4 = sandwich_csv(verify_sandwich(fams, sw));
  ok = ok && s1 == s4;

  TailOptions ta;
  ta.t_grid = {0.5, 1.0, 2.0};
  ta.samples = 50000;
  ta.seed = 83;
  ta.threads = 1;
  auto t1 = tail_csv(verify_tail(fams, ta));
  ta.threads = 4;
  auto t4 = tail_csv(verify_tail(fams, ta));
  ok = ok && t1 == t4;

  Thm2Options th;
  th.draws = 200;
  th.seed = 83;
  th.threads = 1;
  auto h1 = thm2_csv(verify_thm2(fams, th));
  th.threads = 4;
  auto h4 = thm2_csv(verify_thm2(fams, th));
  ok = ok && h1 == h4;

  ConjectureOptions co;
  co.draws = 200;
  co.seed = 83;
  co.threads = 1;
  std::vector<FamilySpec> f3{{"gaussian-iid", {3, 3, 3}, 1, 84}};
  auto c1 = conjecture_csv(probe_conjecture(f3, co));
  co.threads = 4;
  auto c4 = conjecture_csv(probe_conjecture(f3, co));
  ok = ok && c1 == c4;

  detail = ok ? "sandwich/tail/expected-norm/conjecture CSV bodies "
                "byte-identical for 1 vs 4 threads"
              : "CSV bodies differ across thread counts";
  return ok;
}

// ---- criterion 9: combinatorics ---------------------------------------------

bool criterion_combinatorics(std::string& detail) {
  std::vector<std::vector<std::uint64_t>> tri(9,
                                              std::vector<std::uint64_t>(9, 0));
  tri[0][0] = 1;
  for (int n = 1; n <= 8; ++n)
    for (int k = 1; k <= n; ++k)
      tri[n][k] = static_cast<std::uint64_t>(k) * tri[n - 1][k] +
                  tri[n - 1][k - 1];
  bool ok = true;
  for (int d = 1; d <= 8; ++d) {
    std::uint64_t bell = 0;
    for (int k = 1; k <= d; ++k) {
      ok = ok && stirling2(d, k) == tri[d][k];
      bell += tri[d][k];
    }
    ok = ok && bell_number(d) == bell;
  }
  int round_trips = 0;
  for (int d = 1; d <= 6; ++d) {
    for (const auto& p : enumerate_all_partitions(d)) {
      std::string s = format_partition(p);
      ok = ok && parse_partition(s, d) == p &&
           format_partition(parse_partition(s, d)) == s;
      ++round_trips;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "Stirling/Bell match for d <= 8; %d parser round-trips",
                round_trips);
  detail = buf;
  return ok;
}

struct Criterion {
  const char* name;
  bool (*run)(std::string&);
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"norm-engine oracle equivalence", criterion_norm_oracles},
      {"refinement monotonicity", criterion_monotonicity},
      {"exact order-1/order-2 forms and moment doubling",
       criterion_exact_forms},
      {"Monte Carlo calibration", criterion_mc_calibration},
      {"moment sandwich at desk scale", criterion_sandwich},
      {"tail envelope constants", criterion_tail_envelope},
      {"expected contracted norm bound", criterion_expected_norm},
      {"thread-count determinism of reports", criterion_determinism},
      {"partition combinatorics", criterion_combinatorics},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    auto start = std::chrono::steady_clock::now();
    std::string det;
    bool ok = false;
    try {
      ok = c.run(det);
    } catch (const std::exception& e) {
      det = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    std::printf("[%s] criterion %d: %s (%.1fs) — %s\n", ok ? "PASS" : "FAIL",
                index, c.name, secs, det.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
