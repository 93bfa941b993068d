#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gchaos/mc.hpp"
#include "gchaos/moments.hpp"
#include "gchaos/norms.hpp"
#include "gchaos/tensor.hpp"

namespace gchaos {

// Seeded test-tensor family. Kinds: gaussian-iid, rank-one, diagonal,
// sparse, user-file (reads `path`, ignores shape).
struct FamilySpec {
  std::string kind;
  std::vector<int> shape;
  int count = 1;
  std::uint64_t seed = 1;
  double sparsity = 0.1;
  std::string path;
};

std::vector<Tensor> generate_family(const FamilySpec& spec);

std::string shape_string(const std::vector<int>& shape);

// ---- Moment sandwich ------------------------------------------------------

struct SandwichOptions {
  std::vector<double> p_grid{2, 4, 8, 16};
  std::size_t samples = 200000;
  std::uint64_t seed = 1;
  double bracket_lo = 0.05;
  double bracket_hi = 20.0;
  SolverConfig solver;
  int threads = 1;
};

struct SandwichRow {
  int tensor_index = 0;
  std::string kind;
  int d = 0;
  std::string shape;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double p = 0.0;
  double mp = 0.0;
  double pnorm = 0.0, pnorm_lo = 0.0, pnorm_hi = 0.0;
  double ratio = 0.0, ratio_lo = 0.0, ratio_hi = 0.0;
  std::string flag;  // ok | degenerate | unconverged | warn-conditioning
};

struct SandwichReport {
  std::vector<SandwichRow> rows;
  std::map<int, std::pair<double, double>> fitted;  // d -> (c_lo, c_hi)
  double bracket_lo = 0.0, bracket_hi = 0.0;
  bool pass = true;
};

SandwichReport verify_sandwich(const std::vector<FamilySpec>& families,
                               const SandwichOptions& opts);

// ---- Tail envelope ---------------------------------------------------------

struct TailOptions {
  std::vector<double> t_grid;
  std::size_t samples = 1000000;
  std::uint64_t seed = 1;
  double c_u = 1.0;
  double c_l = 1.0;
  std::size_t min_tail_count = 20;  // P-hat * N below this is uninformative
  double max_fitted_cu = 0.0;       // 0 disables the pass check
  SolverConfig solver;
  int threads = 1;
};

struct TailRow {
  int tensor_index = 0;
  std::string kind;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double t = 0.0;
  double exponent = 0.0;
  std::string witness;
  double phat = 0.0, phat_lo = 0.0, phat_hi = 0.0;
  double upper = 0.0, lower = 0.0;
  bool informative = false;
};

struct TailFit {
  int tensor_index = 0;
  std::string kind;
  double fitted_cu = 0.0;  // smallest c with min(1, c e^{-E/c}) >= P-hat
  double fitted_cl = 0.0;  // smallest c with (1/c) e^{-cE} <= P-hat
  bool finite = false;
  std::string flag;
};

struct TailReport {
  std::vector<TailRow> rows;
  std::vector<TailFit> fits;
  bool pass = true;
};

TailReport verify_tail(const std::vector<FamilySpec>& families,
                       const TailOptions& opts);

// ---- Expected contracted-norm bound ----------------------------------------

struct Thm2Options {
  std::vector<double> p_grid{2, 4, 8, 16, 32};
  std::size_t draws = 500;
  std::uint64_t seed = 1;
  double bound_factor = 20.0;
  SolverConfig solver;
  int threads = 1;
};

struct Thm2Row {
  int tensor_index = 0;
  std::string kind;
  int d = 0;
  std::string shape;
  std::uint64_t seed = 0;
  std::size_t draws = 0;
  double lhs = 0.0, lhs_lo = 0.0, lhs_hi = 0.0;
  double rhs_min = 0.0;
  double rhs_argmin_p = 0.0;
  double ratio = 0.0;
  std::string flag;
};

struct Thm2Report {
  std::vector<Thm2Row> rows;
  double fitted_constant = 0.0;  // max over family of lhs / rhs_min
  double bound_factor = 0.0;
  bool pass = true;
};

Thm2Report verify_thm2(const std::vector<FamilySpec>& families,
                       const Thm2Options& opts);

// ---- Sharper-bound conjecture probe -----------------------------------------

struct ConjectureOptions {
  std::size_t draws = 500;
  std::uint64_t seed = 1;
  SolverConfig solver;
  int threads = 1;
};

struct ConjectureRow {
  int tensor_index = 0;
  std::string kind;
  int d = 0;
  std::string shape;
  std::uint64_t seed = 0;
  std::size_t draws = 0;
  double lhs = 0.0, lhs_lo = 0.0, lhs_hi = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::string flag;  // ok | degenerate
};

struct ConjectureReport {
  std::vector<ConjectureRow> rows;
};

ConjectureReport probe_conjecture(const std::vector<FamilySpec>& families,
                                  const ConjectureOptions& opts);

// ---- Report serialization --------------------------------------------------

// Fixed %.12g numeric formatting so report bodies are byte-stable.
std::string format_number(double v);

std::string sandwich_csv(const SandwichReport& r);
std::string tail_csv(const TailReport& r);
std::string thm2_csv(const Thm2Report& r);
std::string conjecture_csv(const ConjectureReport& r);

std::string sandwich_json(const SandwichReport& r, const SandwichOptions& o);
std::string tail_json(const TailReport& r, const TailOptions& o);
std::string thm2_json(const Thm2Report& r, const Thm2Options& o);
std::string conjecture_json(const ConjectureReport& r,
                            const ConjectureOptions& o);

}  // namespace gchaos
