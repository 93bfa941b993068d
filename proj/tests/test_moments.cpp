#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
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

}  // namespace

TEST_CASE("norm table covers every partition in enumeration order") {
  Tensor a = random_tensor({2, 2, 2}, 3);
  auto table = compute_norm_table(a);
  CHECK(table.order == 3);
  REQUIRE(table.partitions.size() == bell_number(3));
  CHECK(table.partitions == enumerate_all_partitions(3));
  CHECK(table.all_converged());
  CHECK(table.frobenius() == doctest::Approx(a.frobenius()).epsilon(1e-12));
  CHECK(table.injective() ==
        doctest::Approx(table.value(parse_partition("1|2|3", 3)))
            .epsilon(1e-12));
  CHECK(table.injective() <= table.frobenius() + 1e-10);
}

TEST_CASE("moment functional closed forms") {
  // order 1: m_p = sqrt(p) |a|_2
  Tensor v = make_tensor({2}, {3, 4});
  auto tv = compute_norm_table(v);
  CHECK(moment_functional(tv, 4.0) == doctest::Approx(10.0).epsilon(1e-12));
  for (double p : {1.0, 2.0, 7.5, 16.0}) {
    CHECK(moment_functional(tv, p) ==
          doctest::Approx(std::sqrt(p) * 5.0).epsilon(1e-12));
  }

  // order 2: m_p = sqrt(p) |A|_HS + p |A|_op
  Tensor id = make_tensor({2, 2}, {1, 0, 0, 1});
  auto ti = compute_norm_table(id);
  for (double p : {2.0, 4.0, 9.0}) {
    CHECK(moment_functional(ti, p) ==
          doctest::Approx(std::sqrt(p) * std::sqrt(2.0) + p).epsilon(1e-12));
  }

  // order 3 unit rank-one: every partition norm is 1, so
  // m_p = p^{1/2} + 3p + p^{3/2}
  std::vector<double> e(8, 0.0);
  e[0] = 1.0;
  Tensor cube({2, 2, 2}, e);
  auto tc = compute_norm_table(cube);
  CHECK(moment_functional(tc, 4.0) == doctest::Approx(22.0).epsilon(1e-10));

  CHECK_THROWS_AS((moment_functional(tv, 0.5)), std::invalid_argument);
}

TEST_CASE("doubling the moment index costs at most 2^(d/2)") {
  std::vector<std::vector<int>> shapes{{6}, {3, 4}, {2, 3, 2}, {2, 2, 2, 2}};
  for (const auto& shape : shapes) {
    Tensor a = random_tensor(shape, 17 + shape.size());
    auto table = compute_norm_table(a);
    double cap = std::pow(2.0, 0.5 * static_cast<double>(shape.size()));
    for (double p : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      double mp = moment_functional(table, p);
      double m2p = moment_functional(table, 2.0 * p);
      CHECK(m2p <= cap * mp * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("moment profile decomposes the functional") {
  Tensor a = random_tensor({3, 3}, 8);
  auto table = compute_norm_table(a);
  auto profile = moment_profile(table, {2.0, 4.0, 8.0});
  REQUIRE(profile.values.size() == 3);
  for (std::size_t i = 0; i < profile.p_grid.size(); ++i) {
    double sum = 0.0;
    for (const auto& c : profile.contributions[i]) sum += c.term;
    CHECK(sum == doctest::Approx(profile.values[i]).epsilon(1e-12));
    CHECK(profile.values[i] ==
          doctest::Approx(moment_functional(table, profile.p_grid[i]))
              .epsilon(1e-12));
  }
}

TEST_CASE("tail exponent picks the minimizing partition") {
  Tensor id = make_tensor({2, 2}, {1, 0, 0, 1});
  auto table = compute_norm_table(id);

  auto big = tail_exponent(table, 4.0);
  CHECK(big.value == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(format_partition(big.witness) == "1|2");

  auto small = tail_exponent(table, 0.5);
  CHECK(small.value == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(format_partition(small.witness) == "1,2");

  auto zero_table = compute_norm_table(Tensor::zeros({2, 2}));
  CHECK_THROWS_AS((tail_exponent(zero_table, 1.0)), std::domain_error);
}

TEST_CASE("tail envelope shape") {
  Tensor a = random_tensor({3, 3}, 21);
  auto table = compute_norm_table(a);
  std::vector<double> grid{0.5, 1.0, 2.0, 4.0, 8.0};
  auto env = tail_envelope(table, grid, 1.5, 2.0);
  REQUIRE(env.t_grid == grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double e = env.exponent[i];
    CHECK(env.upper[i] ==
          doctest::Approx(std::min(1.0, 1.5 * std::exp(-e / 1.5)))
              .epsilon(1e-12));
    CHECK(env.lower[i] ==
          doctest::Approx(0.5 * std::exp(-2.0 * e)).epsilon(1e-12));
    CHECK(env.upper[i] <= 1.0);
    if (i > 0) CHECK(env.exponent[i] >= env.exponent[i - 1] - 1e-12);
  }
}

TEST_CASE("gaussian absolute moments") {
  CHECK(gaussian_abs_moment(2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gaussian_abs_moment(4.0) ==
        doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-12));
  CHECK(gaussian_abs_moment(1.0) ==
        doctest::Approx(std::sqrt(2.0 / 3.14159265358979323846))
            .epsilon(1e-12));
  CHECK(gaussian_abs_moment(6.0) ==
        doctest::Approx(std::pow(15.0, 1.0 / 6.0)).epsilon(1e-12));
}

TEST_CASE("conjectured bound right side") {
  // order 2: s_1 reduces to the Frobenius norm, exponents collapse to
  // inj^0 * frob^1, so the right side is 2 |A|_HS
  Tensor id = make_tensor({2, 2}, {1, 0, 0, 1});
  auto t2 = compute_norm_table(id);
  CHECK(conjecture_rhs(t2) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));

  // order 3 unit rank-one: s_2 = 2, inj = frob = 1, right side 3
  std::vector<double> e(8, 0.0);
  e[0] = 1.0;
  Tensor cube({2, 2, 2}, e);
  auto t3 = compute_norm_table(cube);
  CHECK(conjecture_rhs(t3) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(s_k_from_table(t3, 2) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s_k_from_table(t3, 1) ==
        doctest::Approx(s_k(cube, 1)).epsilon(1e-9));
}
