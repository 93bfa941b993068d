#include "gchaos/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "gchaos/rng.hpp"
#include "json.hpp"

namespace gchaos {

namespace {

double euclidean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> basis_vector(int dim) {
  std::vector<double> e(static_cast<std::size_t>(dim), 0.0);
  e[0] = 1.0;
  return e;
}

Eigen::MatrixXd to_matrix(const Tensor& b) {
  auto rows = static_cast<Eigen::Index>(b.shape()[0]);
  auto cols = static_cast<Eigen::Index>(b.shape()[1]);
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(b.data().data(),
                                                          rows, cols);
}

// Top singular value through the Gram matrix of the smaller side.
double top_singular_value(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd gram = m.rows() <= m.cols()
                             ? Eigen::MatrixXd(m * m.transpose())
                             : Eigen::MatrixXd(m.transpose() * m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  double top = eig.eigenvalues().maxCoeff();
  return std::sqrt(std::max(0.0, top));
}

// Contracts every axis except `keep`, in descending axis order (removing a
// higher axis never renumbers a lower one). Returns the gradient vector over
// axis `keep`.
std::vector<double> contract_all_but(const Tensor& b,
                                     const std::vector<std::vector<double>>& x,
                                     int keep) {
  if (b.order() == 1) return b.data();
  bool first = true;
  Tensor hold = b;
  for (int axis = b.order() - 1; axis >= 0; --axis) {
    if (axis == keep) continue;
    if (first) {
      hold = contract_axis(b, axis, x[static_cast<std::size_t>(axis)]);
      first = false;
    } else {
      hold = contract_axis(hold, axis, x[static_cast<std::size_t>(axis)]);
    }
  }
  return hold.data();
}

struct AlsRun {
  std::vector<std::vector<double>> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
};

AlsRun als_from_start(const Tensor& b, std::vector<std::vector<double>> x,
                      const SolverConfig& cfg) {
  AlsRun run;
  double obj = multilinear_value(b, x);
  if (obj < 0.0) {
    for (double& v : x[0]) v = -v;
    obj = -obj;
  }
  for (int it = 1; it <= cfg.max_iters; ++it) {
    run.iterations = it;
    double before = obj;
    for (int l = 0; l < b.order(); ++l) {
      std::vector<double> w = contract_all_but(b, x, l);
      double val = euclidean(w);
      // no update when the improvement is below tolerance
      if (val > obj + cfg.tol * std::max(1.0, obj)) {
        auto lu = static_cast<std::size_t>(l);
        for (std::size_t i = 0; i < w.size(); ++i) x[lu][i] = w[i] / val;
        obj = val;
      }
    }
    run.residual = (obj - before) / std::max(obj, 1e-300);
    if (run.residual < cfg.tol) {
      run.converged = true;
      break;
    }
  }
  run.value = multilinear_value(b, x);
  run.x = std::move(x);
  return run;
}

// Leading left singular vector of every mode unfolding, via the mode Gram
// matrix; the standard strong starting point for the injective norm.
std::vector<std::vector<double>> hosvd_start(const Tensor& b) {
  std::vector<std::vector<double>> x;
  const auto& shape = b.shape();
  for (int l = 0; l < b.order(); ++l) {
    auto lu = static_cast<std::size_t>(l);
    auto m = static_cast<std::size_t>(shape[lu]);
    std::size_t stride = b.strides()[lu];
    std::size_t cols = b.size() / m;
    Eigen::MatrixXd mat(static_cast<Eigen::Index>(m),
                        static_cast<Eigen::Index>(cols));
    for (std::size_t flat = 0; flat < b.size(); ++flat) {
      std::size_t coord = (flat / stride) % m;
      std::size_t high = flat / (stride * m);
      std::size_t low = flat % stride;
      mat(static_cast<Eigen::Index>(coord),
          static_cast<Eigen::Index>(high * stride + low)) = b.data()[flat];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mat * mat.transpose());
    Eigen::Index arg = 0;
    eig.eigenvalues().maxCoeff(&arg);
    Eigen::VectorXd lead = eig.eigenvectors().col(arg);
    for (Eigen::Index i = 0; i < lead.size(); ++i) {
      if (std::abs(lead(i)) > 1e-12) {
        if (lead(i) < 0) lead = -lead;
        break;
      }
    }
    x.emplace_back(lead.data(), lead.data() + lead.size());
  }
  return x;
}

std::vector<std::vector<double>> random_start(const Tensor& b,
                                              std::uint64_t seed) {
  GaussianStream g(seed);
  std::vector<std::vector<double>> x;
  for (int n : b.shape()) {
    std::vector<double> v(static_cast<std::size_t>(n));
    g.fill(v);
    double nrm = euclidean(v);
    if (nrm == 0.0) {
      v = basis_vector(n);
    } else {
      for (double& c : v) c /= nrm;
    }
    x.push_back(std::move(v));
  }
  return x;
}

NormResult als_norm(const Tensor& b, const SolverConfig& cfg) {
  int starts = cfg.restarts + 1;
  std::vector<AlsRun> runs(static_cast<std::size_t>(starts));
  parallel_for(static_cast<std::size_t>(starts), cfg.threads,
               [&](std::size_t s) {
                 auto x0 = s == 0 ? hosvd_start(b)
                                  : random_start(b, substream_seed(
                                                        cfg.seed, kRoleRestart,
                                                        s - 1));
                 runs[s] = als_from_start(b, std::move(x0), cfg);
               });
  std::size_t best = 0;
  for (std::size_t s = 1; s < runs.size(); ++s) {
    if (runs[s].value > runs[best].value) best = s;
  }
  NormResult r;
  r.value = runs[best].value;
  r.certificate = runs[best].x;
  r.method = "als";
  r.restarts_used = starts;
  r.iterations = runs[best].iterations;
  r.converged = runs[best].converged;
  r.residual = runs[best].residual;
  return r;
}

}  // namespace

NormResult partition_norm(const Tensor& a, const Partition& p,
                          const SolverConfig& cfg) {
  UnfoldResult u = unfold(a, p);
  const Tensor& b = u.tensor;
  int k = b.order();

  if (b.frobenius() == 0.0) {
    NormResult r;
    r.value = 0.0;
    for (int n : b.shape()) r.certificate.push_back(basis_vector(n));
    r.method = k == 1 ? "frobenius" : (k == 2 ? "spectral" : "als");
    r.restarts_used = 0;
    r.converged = true;
    return r;
  }

  if (k == 1) {
    NormResult r;
    r.value = b.frobenius();
    std::vector<double> cert(b.data());
    for (double& c : cert) c /= r.value;
    r.certificate.push_back(std::move(cert));
    r.method = "frobenius";
    return r;
  }

  if (k == 2) {
    Eigen::MatrixXd m = to_matrix(b);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    NormResult r;
    r.value = svd.singularValues()(0);
    Eigen::VectorXd uvec = svd.matrixU().col(0);
    Eigen::VectorXd vvec = svd.matrixV().col(0);
    r.certificate.emplace_back(uvec.data(), uvec.data() + uvec.size());
    r.certificate.emplace_back(vvec.data(), vvec.data() + vvec.size());
    r.method = "spectral";
    return r;
  }

  return als_norm(b, cfg);
}

namespace {

// Deterministic grid on the unit sphere of R^n: hyperspherical angles with
// step <= resolution, polar angles over [0, pi] inclusive, azimuth over
// [0, 2*pi).
std::vector<std::vector<double>> sphere_grid(int n, double resolution) {
  using std::numbers::pi;
  std::vector<std::vector<double>> pts;
  if (n == 1) {
    pts.push_back({1.0});
    pts.push_back({-1.0});
    return pts;
  }
  int polar_count = n - 2;
  auto mp = static_cast<int>(std::ceil(pi / resolution));
  auto ma = static_cast<int>(std::ceil(2.0 * pi / resolution));
  std::vector<int> steps;
  for (int j = 0; j < polar_count; ++j) steps.push_back(mp + 1);
  steps.push_back(ma);

  std::vector<int> idx(steps.size(), 0);
  while (true) {
    std::vector<double> angle(steps.size());
    for (std::size_t j = 0; j < steps.size(); ++j) {
      bool azimuth = j + 1 == steps.size();
      angle[j] = azimuth ? idx[j] * 2.0 * pi / ma : idx[j] * pi / mp;
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    double sines = 1.0;
    for (std::size_t j = 0; j + 1 < static_cast<std::size_t>(n); ++j) {
      x[j] = sines * std::cos(angle[j]);
      sines *= std::sin(angle[j]);
    }
    x[static_cast<std::size_t>(n - 1)] = sines;
    pts.push_back(std::move(x));
    int pos = static_cast<int>(steps.size()) - 1;
    while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] >=
                           steps[static_cast<std::size_t>(pos)]) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return pts;
}

constexpr double kOracleGridBudget = 5e6;

}  // namespace

double injective_norm_oracle(const Tensor& a, double resolution) {
  if (!(resolution > 0.0 && resolution <= 0.1)) {
    throw std::invalid_argument("oracle resolution must be in (0, 0.1]");
  }
  for (int n : a.shape()) {
    if (n > 4) {
      throw std::invalid_argument("oracle requires every dimension <= 4");
    }
  }
  if (a.frobenius() == 0.0) return 0.0;

  int d = a.order();
  if (d == 1) return a.frobenius();
  if (d == 2) return top_singular_value(to_matrix(a));

  std::vector<std::vector<std::vector<double>>> grids;
  double combos = 1.0;
  for (int axis = 0; axis < d - 2; ++axis) {
    grids.push_back(
        sphere_grid(a.shape()[static_cast<std::size_t>(axis)], resolution));
    combos *= static_cast<double>(grids.back().size());
    if (combos > kOracleGridBudget) {
      throw std::runtime_error("oracle dimensions too large for the grid budget");
    }
  }

  std::vector<int> axes;
  for (int axis = 0; axis < d - 2; ++axis) axes.push_back(axis);

  double best = 0.0;
  std::vector<std::size_t> idx(grids.size(), 0);
  while (true) {
    std::vector<std::vector<double>> vecs;
    for (std::size_t j = 0; j < grids.size(); ++j) {
      vecs.push_back(grids[j][idx[j]]);
    }
    Tensor residual = contract_block(a, axes, vecs);
    best = std::max(best, top_singular_value(to_matrix(residual)));
    int pos = static_cast<int>(idx.size()) - 1;
    while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] >=
                           grids[static_cast<std::size_t>(pos)].size()) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return best;
}

std::vector<Partition> s_k_partitions(int d, int k) {
  if (d < 2) {
    throw std::invalid_argument("s_k requires order >= 2");
  }
  if (k < 1 || k > d - 1) {
    throw std::invalid_argument("s_k index must be in [1, d-1]");
  }
  if (k <= d - 2) return enumerate_partitions(d, k);
  std::vector<Partition> out;
  for (int j = 1; j <= d - 1; ++j) {
    std::vector<std::vector<int>> blocks;
    blocks.push_back({j, d});
    for (int l = 1; l <= d - 1; ++l) {
      if (l != j) blocks.push_back({l});
    }
    out.push_back(make_partition(std::move(blocks), d));
  }
  std::sort(out.begin(), out.end());
  return out;
}

double s_k(const Tensor& a, int k, const SolverConfig& cfg) {
  double sum = 0.0;
  for (const auto& p : s_k_partitions(a.order(), k)) {
    sum += partition_norm(a, p, cfg).value;
  }
  return sum;
}

std::string norm_result_to_json(const NormResult& r) {
  nlohmann::ordered_json j;
  j["value"] = r.value;
  j["certificate"] = r.certificate;
  j["method"] = r.method;
  j["restarts_used"] = r.restarts_used;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["residual"] = r.residual;
  return j.dump();
}

}  // namespace gchaos
