// gchaos: partition norms, moment functionals and tail envelopes of Gaussian
// chaoses, with Monte Carlo verification experiments.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gchaos/harness.hpp"
#include "gchaos/mc.hpp"
#include "gchaos/moments.hpp"
#include "gchaos/norms.hpp"
#include "gchaos/partition.hpp"
#include "gchaos/rng.hpp"
#include "gchaos/tensor.hpp"
#include "json.hpp"

namespace {

using namespace gchaos;

constexpr int kExitPass = 0;
constexpr int kExitBracketViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitSolverExhausted = 3;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    out.push_back(std::stod(item));
  }
  if (out.empty()) {
    throw CLI::ValidationError("expected a comma-separated list of numbers");
  }
  return out;
}

// "a:b:n" -> n points linearly spaced from a to b inclusive
std::vector<double> parse_grid(const std::string& text) {
  double a = 0.0, b = 0.0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  if (!(is >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 2) {
    throw CLI::ValidationError("grid must be a:b:n with n >= 2");
  }
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(a + (b - a) * static_cast<double>(i) /
                          static_cast<double>(n - 1));
  }
  return out;
}

void write_output(const std::string& body, const std::string& path) {
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write output file: " + path);
  }
  out << body;
}

struct CommonOpts {
  std::string tensor_path;
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 1;
  int threads = 1;
};

void add_solver_flags(CLI::App* cmd, SolverConfig& cfg) {
  cmd->add_option("--restarts", cfg.restarts, "random ALS restarts");
  cmd->add_option("--max-iters", cfg.max_iters, "ALS sweep limit");
  cmd->add_option("--tol", cfg.tol, "ALS relative convergence tolerance");
  cmd->add_option("--solver-seed", cfg.seed, "seed for ALS restarts");
}

// "3x4x3" or "3,4,3" -> {3, 4, 3}
std::vector<int> parse_shape(const std::string& text) {
  std::vector<int> out;
  std::string item;
  for (char c : text + "x") {
    if (c == 'x' || c == ',') {
      if (!item.empty()) out.push_back(std::stoi(item));
      item.clear();
    } else {
      item += c;
    }
  }
  if (out.empty()) {
    throw CLI::ValidationError("shape must look like 3x4x3");
  }
  return out;
}

struct FamilyFlags {
  std::string kind = "gaussian-iid";
  std::string shape;
  int count = 3;
  double sparsity = 0.1;
  std::string path;
};

void add_family_flags(CLI::App* cmd, FamilyFlags& f) {
  cmd->add_option("--family", f.kind,
                  "gaussian-iid|rank-one|diagonal|sparse|user-file");
  cmd->add_option("--shape", f.shape, "tensor shape, e.g. 3x4x3");
  cmd->add_option("--count", f.count, "tensors per family");
  cmd->add_option("--sparsity", f.sparsity, "keep probability for sparse");
  cmd->add_option("--file", f.path, "tensor file for kind user-file");
}

std::vector<FamilySpec> family_from_flags(const FamilyFlags& f,
                                          std::uint64_t seed) {
  FamilySpec spec;
  spec.kind = f.kind;
  if (!f.shape.empty()) spec.shape = parse_shape(f.shape);
  spec.count = f.count;
  spec.seed = seed;
  spec.sparsity = f.sparsity;
  spec.path = f.path;
  return {spec};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian chaos partition norms, moments and tails"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--seed", common.seed, "master seed");
  app.add_option("--threads", common.threads, "worker threads");
  app.add_option("--out", common.out_path, "output file (default stdout)");
  app.add_option("--format", common.format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));

  // norm
  auto* norm_cmd = app.add_subcommand("norm", "partition norm with certificate");
  std::string norm_tensor, norm_partition;
  SolverConfig norm_cfg;
  norm_cmd->add_option("--tensor", norm_tensor, "tensor JSON file")->required();
  norm_cmd->add_option("--partition", norm_partition, "e.g. \"1|2,3\"")
      ->required();
  add_solver_flags(norm_cmd, norm_cfg);

  // mp
  auto* mp_cmd = app.add_subcommand("mp", "moment functional over a p grid");
  std::string mp_tensor, mp_list = "2,4,8,16";
  SolverConfig mp_cfg;
  mp_cmd->add_option("--tensor", mp_tensor, "tensor JSON file")->required();
  mp_cmd->add_option("--p", mp_list, "comma-separated p values");
  add_solver_flags(mp_cmd, mp_cfg);

  // tail
  auto* tail_cmd = app.add_subcommand("tail", "tail exponent and envelope");
  std::string tail_tensor, tail_grid = "0:10:41";
  double tail_cu = 1.0, tail_cl = 1.0;
  SolverConfig tail_cfg;
  tail_cmd->add_option("--tensor", tail_tensor, "tensor JSON file")->required();
  tail_cmd->add_option("--t-grid", tail_grid, "a:b:n");
  tail_cmd->add_option("--cu", tail_cu, "upper envelope constant");
  tail_cmd->add_option("--cl", tail_cl, "lower envelope constant");
  add_solver_flags(tail_cmd, tail_cfg);

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "chaos sampling report");
  std::string sample_tensor, sample_p = "2,4,8", sample_tgrid;
  std::size_t sample_n = 100000;
  bool sample_coupled_mode = false;
  sample_cmd->add_option("--tensor", sample_tensor, "tensor JSON file")
      ->required();
  sample_cmd->add_option("--n", sample_n, "sample count");
  sample_cmd->add_option("--p", sample_p, "comma-separated p values");
  sample_cmd->add_option("--t-grid", sample_tgrid, "a:b:n empirical tail grid");
  sample_cmd->add_flag("--coupled", sample_coupled_mode,
                       "coupled sampler (single Gaussian vector)");

  // enorm
  auto* enorm_cmd =
      app.add_subcommand("enorm", "expected norm of a Gaussian contraction");
  std::string enorm_tensor, enorm_partition;
  std::vector<int> enorm_axes;
  std::size_t enorm_m = 500;
  SolverConfig enorm_cfg;
  enorm_cmd->add_option("--tensor", enorm_tensor, "tensor JSON file")
      ->required();
  enorm_cmd->add_option("--contract", enorm_axes, "axes to contract (1-based)")
      ->required()
      ->expected(-1);
  enorm_cmd->add_option("--partition", enorm_partition,
                        "partition of the residual axes, renumbered 1..r");
  enorm_cmd->add_option("--m", enorm_m, "outer draw count");
  add_solver_flags(enorm_cmd, enorm_cfg);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "generate a tensor family");
  FamilyFlags gen_family;
  std::string gen_prefix = "tensor";
  add_family_flags(gen_cmd, gen_family);
  gen_cmd->add_option("--prefix", gen_prefix, "output path prefix");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "verification experiments");
  verify_cmd->require_subcommand(1);

  auto* vs_cmd = verify_cmd->add_subcommand("sandwich", "moment sandwich");
  FamilyFlags vs_family;
  std::string vs_p = "2,4,8,16";
  std::size_t vs_n = 200000;
  double vs_lo = 0.05, vs_hi = 20.0;
  SolverConfig vs_cfg;
  add_family_flags(vs_cmd, vs_family);
  vs_cmd->add_option("--p", vs_p, "comma-separated p values");
  vs_cmd->add_option("--n", vs_n, "samples per tensor");
  vs_cmd->add_option("--bracket-lo", vs_lo, "ratio bracket lower edge");
  vs_cmd->add_option("--bracket-hi", vs_hi, "ratio bracket upper edge");
  add_solver_flags(vs_cmd, vs_cfg);

  auto* vt_cmd = verify_cmd->add_subcommand("tail", "tail envelope fit");
  FamilyFlags vt_family;
  std::string vt_grid = "0:6:25";
  std::size_t vt_n = 1000000;
  double vt_cu = 1.0, vt_cl = 1.0, vt_max_cu = 0.0;
  SolverConfig vt_cfg;
  add_family_flags(vt_cmd, vt_family);
  vt_cmd->add_option("--t-grid", vt_grid, "a:b:n");
  vt_cmd->add_option("--n", vt_n, "samples per tensor");
  vt_cmd->add_option("--cu", vt_cu, "reported upper envelope constant");
  vt_cmd->add_option("--cl", vt_cl, "reported lower envelope constant");
  vt_cmd->add_option("--max-cu", vt_max_cu,
                     "fail when the fitted c_u exceeds this (0 = off)");
  add_solver_flags(vt_cmd, vt_cfg);

  auto* v2_cmd = verify_cmd->add_subcommand("thm2", "expected-norm bound");
  FamilyFlags v2_family;
  std::string v2_p = "2,4,8,16,32";
  std::size_t v2_m = 500;
  double v2_factor = 20.0;
  SolverConfig v2_cfg;
  add_family_flags(v2_cmd, v2_family);
  v2_cmd->add_option("--p", v2_p, "comma-separated p values");
  v2_cmd->add_option("--m", v2_m, "outer draws");
  v2_cmd->add_option("--bound-factor", v2_factor, "allowed lhs/rhs factor");
  add_solver_flags(v2_cmd, v2_cfg);

  auto* vc_cmd =
      verify_cmd->add_subcommand("conjecture", "sharper-bound probe");
  FamilyFlags vc_family;
  std::size_t vc_m = 500;
  SolverConfig vc_cfg;
  add_family_flags(vc_cmd, vc_family);
  vc_cmd->add_option("--m", vc_m, "outer draws");
  add_solver_flags(vc_cmd, vc_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*norm_cmd) {
      Tensor a = load_tensor_json(norm_tensor);
      Partition p = parse_partition(norm_partition, a.order());
      norm_cfg.threads = common.threads;
      NormResult r = partition_norm(a, p, norm_cfg);
      write_output(norm_result_to_json(r) + "\n", common.out_path);
      return r.converged ? kExitPass : kExitSolverExhausted;
    }

    if (*mp_cmd) {
      Tensor a = load_tensor_json(mp_tensor);
      mp_cfg.threads = common.threads;
      NormTable table = compute_norm_table(a, mp_cfg);
      MomentProfile profile = moment_profile(table, parse_list(mp_list));
      std::ostringstream os;
      os << "p,m_p,top_contribution,witness_partition\n";
      for (std::size_t i = 0; i < profile.p_grid.size(); ++i) {
        const auto& contribs = profile.contributions[i];
        std::size_t top = 0;
        for (std::size_t c = 1; c < contribs.size(); ++c) {
          if (contribs[c].term > contribs[top].term) top = c;
        }
        os << format_number(profile.p_grid[i]) << ','
           << format_number(profile.values[i]) << ','
           << format_number(contribs[top].term) << ",\""
           << format_partition(contribs[top].partition) << "\"\n";
      }
      write_output(os.str(), common.out_path);
      return table.all_converged() ? kExitPass : kExitSolverExhausted;
    }

    if (*tail_cmd) {
      Tensor a = load_tensor_json(tail_tensor);
      tail_cfg.threads = common.threads;
      NormTable table = compute_norm_table(a, tail_cfg);
      TailEnvelope env =
          tail_envelope(table, parse_grid(tail_grid), tail_cu, tail_cl);
      std::ostringstream os;
      os << "t,exponent,witness,upper,lower\n";
      for (std::size_t i = 0; i < env.t_grid.size(); ++i) {
        os << format_number(env.t_grid[i]) << ','
           << format_number(env.exponent[i]) << ",\""
           << format_partition(env.witness[i]) << "\","
           << format_number(env.upper[i]) << ','
           << format_number(env.lower[i]) << '\n';
      }
      write_output(os.str(), common.out_path);
      return kExitPass;
    }

    if (*sample_cmd) {
      Tensor a = load_tensor_json(sample_tensor);
      std::vector<double> samples =
          sample_coupled_mode
              ? sample_coupled(a, sample_n, common.seed, common.threads)
              : sample_decoupled(a, sample_n, common.seed, common.threads);
      auto pnorms = empirical_pnorm(samples, parse_list(sample_p),
                                    substream_seed(common.seed, kRoleBootstrap,
                                                   0));
      std::ostringstream os;
      os << "metric,arg,value,lo,hi,flag\n";
      for (const auto& e : pnorms) {
        std::string flag =
            e.degenerate ? "degenerate"
                         : (e.conditioning_warning ? "warn-conditioning" : "ok");
        os << "pnorm," << format_number(e.p) << ',' << format_number(e.value)
           << ',' << format_number(e.lo) << ',' << format_number(e.hi) << ','
           << flag << '\n';
      }
      if (!sample_tgrid.empty()) {
        for (const auto& pt : empirical_tail(samples, parse_grid(sample_tgrid))) {
          os << "tail," << format_number(pt.t) << ',' << format_number(pt.phat)
             << ',' << format_number(pt.lo) << ',' << format_number(pt.hi)
             << ",ok\n";
        }
      }
      write_output(os.str(), common.out_path);
      return kExitPass;
    }

    if (*enorm_cmd) {
      Tensor a = load_tensor_json(enorm_tensor);
      enorm_cfg.threads = 1;
      int residual_order = a.order() - static_cast<int>(enorm_axes.size());
      Partition p;
      if (residual_order > 0) {
        if (enorm_partition.empty()) {
          throw std::invalid_argument(
              "--partition required when axes remain after contraction");
        }
        p = parse_partition(enorm_partition, residual_order);
      }
      ExpectedNormEstimate est =
          expected_contracted_norm(a, enorm_axes, p, enorm_m, common.seed,
                                   enorm_cfg, common.threads);
      nlohmann::ordered_json j;
      j["draws"] = est.draws;
      j["mean"] = est.mean;
      j["lo"] = est.lo;
      j["hi"] = est.hi;
      j["unconverged_draws"] = est.unconverged;
      write_output(j.dump(2) + "\n", common.out_path);
      return kExitPass;
    }

    if (*gen_cmd) {
      auto family = family_from_flags(gen_family, common.seed);
      auto tensors = generate_family(family[0]);
      for (std::size_t i = 0; i < tensors.size(); ++i) {
        save_tensor_json(tensors[i],
                         gen_prefix + "_" + std::to_string(i) + ".json");
      }
      return kExitPass;
    }

    if (*vs_cmd) {
      SandwichOptions opts;
      opts.p_grid = parse_list(vs_p);
      opts.samples = vs_n;
      opts.seed = common.seed;
      opts.bracket_lo = vs_lo;
      opts.bracket_hi = vs_hi;
      opts.solver = vs_cfg;
      opts.threads = common.threads;
      SandwichReport r = verify_sandwich(family_from_flags(vs_family,
                                                           common.seed),
                                         opts);
      write_output(common.format == "json" ? sandwich_json(r, opts)
                                           : sandwich_csv(r),
                   common.out_path);
      return r.pass ? kExitPass : kExitBracketViolation;
    }

    if (*vt_cmd) {
      TailOptions opts;
      opts.t_grid = parse_grid(vt_grid);
      opts.samples = vt_n;
      opts.seed = common.seed;
      opts.c_u = vt_cu;
      opts.c_l = vt_cl;
      opts.max_fitted_cu = vt_max_cu;
      opts.solver = vt_cfg;
      opts.threads = common.threads;
      TailReport r = verify_tail(family_from_flags(vt_family, common.seed),
                                 opts);
      write_output(common.format == "json" ? tail_json(r, opts) : tail_csv(r),
                   common.out_path);
      return r.pass ? kExitPass : kExitBracketViolation;
    }

    if (*v2_cmd) {
      Thm2Options opts;
      opts.p_grid = parse_list(v2_p);
      opts.draws = v2_m;
      opts.seed = common.seed;
      opts.bound_factor = v2_factor;
      opts.solver = v2_cfg;
      opts.threads = common.threads;
      Thm2Report r =
          verify_thm2(family_from_flags(v2_family, common.seed), opts);
      write_output(common.format == "json" ? thm2_json(r, opts) : thm2_csv(r),
                   common.out_path);
      return r.pass ? kExitPass : kExitBracketViolation;
    }

    if (*vc_cmd) {
      ConjectureOptions opts;
      opts.draws = vc_m;
      opts.seed = common.seed;
      opts.solver = vc_cfg;
      opts.threads = common.threads;
      ConjectureReport r =
          probe_conjecture(family_from_flags(vc_family, common.seed), opts);
      write_output(common.format == "json" ? conjecture_json(r, opts)
                                           : conjecture_csv(r),
                   common.out_path);
      return kExitPass;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
