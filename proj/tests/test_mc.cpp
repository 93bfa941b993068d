#include <stdexcept>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "gchaos/mc.hpp"
#include "gchaos/moments.hpp"
#include "gchaos/rng.hpp"

using namespace gchaos;

namespace {

Tensor random_tensor(const std::vector<int>& shape, std::uint64_t seed) {
  Tensor z = Tensor::zeros(shape);
  std::vector<double> data(z.size());
  GaussianStream g(seed);
  g.fill(data);
  return Tensor(shape, std::move(data));
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("decoupled sampling is seed-deterministic and thread-invariant") {
  Tensor a = random_tensor({2, 3}, 4);
  auto one = sample_decoupled(a, 10000, 77, 1);
  auto again = sample_decoupled(a, 10000, 77, 1);
  auto four = sample_decoupled(a, 10000, 77, 4);
  CHECK(one == again);
  CHECK(one == four);
  auto other = sample_decoupled(a, 10000, 78, 1);
  CHECK(one != other);
  // chunked substreams: a shorter run is a prefix of a longer one
  auto prefix = sample_decoupled(a, 5000, 77, 2);
  CHECK(std::equal(prefix.begin(), prefix.end(), one.begin()));
}

TEST_CASE("decoupled order-1 samples are standard normal in the scalar case") {
  Tensor a = make_tensor({1}, {1.0});
  auto s = sample_decoupled(a, 200000, 5, 2);
  CHECK(mean_of(s) == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
  CHECK(var_of(s) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("decoupled variance equals the squared Frobenius norm") {
  for (const auto& shape : std::vector<std::vector<int>>{{4}, {2, 3}, {2, 2, 2}}) {
    Tensor a = random_tensor(shape, 9 + shape.size());
    auto s = sample_decoupled(a, 200000, 11, 4);
    double f2 = a.frobenius() * a.frobenius();
    CHECK(var_of(s) == doctest::Approx(f2).epsilon(0.05));
    CHECK(mean_of(s) == doctest::Approx(0.0).scale(std::sqrt(f2)).epsilon(0.03));
  }
}

TEST_CASE("coupled sampling validates support and matches products") {
  // a_{12} = 1 only: S = g_1 g_2
  Tensor a = make_tensor({2, 2}, {0, 1, 0, 0});
  auto s = sample_coupled(a, 200000, 13, 2);
  CHECK(mean_of(s) == doctest::Approx(0.0).scale(1.0).epsilon(0.02));
  CHECK(var_of(s) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(sample_coupled(a, 1000, 13, 1) ==
        std::vector<double>(s.begin(), s.begin() + 1000));

  Tensor diag = make_tensor({2, 2}, {1, 0, 0, 0});
  CHECK_THROWS_AS((sample_coupled(diag, 10, 1)), std::invalid_argument);
  Tensor rect = make_tensor({2, 3}, {0, 1, 0, 0, 0, 0});
  CHECK_THROWS_AS((sample_coupled(rect, 10, 1)), std::invalid_argument);
}

TEST_CASE("empirical p-norm on deterministic samples") {
  std::vector<double> s{1.0, -2.0};
  auto est = empirical_pnorm(s, {1.0, 2.0, 4.0}, 7);
  REQUIRE(est.size() == 3);
  CHECK(est[0].value == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(est[1].value == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));
  CHECK(est[2].value == doctest::Approx(std::pow(8.5, 0.25)).epsilon(1e-12));
  for (const auto& e : est) {
    CHECK(!e.degenerate);
    CHECK(e.lo <= e.value + 1e-12);
    CHECK(e.hi >= e.value - 1e-12);
  }

  auto zero = empirical_pnorm(std::vector<double>{0.0, 0.0}, {2.0}, 7);
  CHECK(zero[0].degenerate);
  CHECK(zero[0].value == 0.0);

  // huge samples that would overflow a naive |s|^p accumulation
  std::vector<double> big(100, 1e200);
  auto safe = empirical_pnorm(big, {8.0}, 7);
  CHECK(safe[0].value == doctest::Approx(1e200).epsilon(1e-10));

  std::vector<double> skew{100.0, 0.1, 0.1, 0.1};
  auto warn = empirical_pnorm(skew, {8.0}, 7);
  CHECK(warn[0].conditioning_warning);

  CHECK_THROWS_AS((empirical_pnorm(s, {0.5}, 7)), std::invalid_argument);
}

TEST_CASE("empirical p-norm is consistent for a standard normal") {
  Tensor a = make_tensor({1}, {1.0});
  auto s = sample_decoupled(a, 400000, 3, 2);
  auto est = empirical_pnorm(s, {2.0, 4.0}, 5);
  CHECK(est[0].value == doctest::Approx(1.0).epsilon(0.01));
  CHECK(est[1].value ==
        doctest::Approx(gaussian_abs_moment(4.0)).epsilon(0.02));
  // the bootstrap interval should cover the truth here
  CHECK(est[0].lo <= 1.0);
  CHECK(est[0].hi >= 1.0);
}

TEST_CASE("empirical tail curve") {
  std::vector<double> s{0.5, -1.5, 2.5};
  auto pts = empirical_tail(s, {0.0, 1.0, 2.0, 3.0});
  REQUIRE(pts.size() == 4);
  CHECK(pts[0].phat == doctest::Approx(1.0));
  CHECK(pts[1].phat == doctest::Approx(2.0 / 3.0));
  CHECK(pts[2].phat == doctest::Approx(1.0 / 3.0));
  CHECK(pts[3].phat == doctest::Approx(0.0));
  CHECK(pts[1].count == 2);
  for (const auto& p : pts) {
    CHECK(p.lo >= 0.0);
    CHECK(p.hi <= 1.0);
    CHECK(p.lo <= p.phat + 1e-12);
    CHECK(p.hi >= p.phat - 1e-12);
  }
  CHECK_THROWS_AS((empirical_tail(s, {2.0, 1.0})), std::invalid_argument);
  CHECK_THROWS_AS((empirical_tail(s, {-1.0, 1.0})), std::invalid_argument);
}

TEST_CASE("expected contracted norm") {
  // fully contracted scalar case: E|g| = sqrt(2/pi)
  Tensor one = make_tensor({1}, {1.0});
  auto full = expected_contracted_norm(one, {1}, Partition{}, 4000, 31);
  CHECK(full.mean ==
        doctest::Approx(std::sqrt(2.0 / 3.14159265358979323846))
            .epsilon(0.05));
  CHECK(full.lo <= full.mean);
  CHECK(full.hi >= full.mean);
  CHECK(full.values.size() == 4000);
  CHECK(full.unconverged == 0);

  // identity matrix, last axis contracted: per draw the residual vector is
  // the Gaussian draw itself, so the mean is E|g_2| = sqrt(pi/2)
  Tensor id = make_tensor({2, 2}, {1, 0, 0, 1});
  auto est = expected_contracted_norm(id, {2}, parse_partition("1", 1), 4000,
                                      31, SolverConfig{}, 2);
  CHECK(est.mean ==
        doctest::Approx(std::sqrt(3.14159265358979323846 / 2.0))
            .epsilon(0.05));

  // determinism across thread counts
  auto est1 = expected_contracted_norm(id, {2}, parse_partition("1", 1), 500,
                                       31, SolverConfig{}, 1);
  auto est4 = expected_contracted_norm(id, {2}, parse_partition("1", 1), 500,
                                       31, SolverConfig{}, 4);
  CHECK(est1.values == est4.values);

  CHECK_THROWS_AS((
      expected_contracted_norm(id, {3}, parse_partition("1", 1), 10, 1)),
      std::invalid_argument);
  CHECK_THROWS_AS((
      expected_contracted_norm(id, {}, parse_partition("1", 1), 10, 1)),
      std::invalid_argument);
}
