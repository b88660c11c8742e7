#include <doctest.h>

#include <cmath>

#include "mrt/mc.hpp"
#include "mrt/moments.hpp"
#include "oracles.hpp"

using namespace mrt;

TEST_CASE("sample moments of small samples") {
  SUBCASE("constant sample") {
    const auto m = sample_moments(ResidenceSample({2, 2, 2}, std::nullopt), 8);
    CHECK(m.mean == 2);
    CHECK(m.raw_moment(2) == 4);
    for (int order = 2; order <= 8; ++order) CHECK(m.central_moment(order) == 0);
  }
  SUBCASE("two-point symmetric sample") {
    const auto m = sample_moments(ResidenceSample({1, 3}, std::nullopt), 4);
    CHECK(m.mean == 2);
    CHECK(m.central_moment(2) == 1);
    CHECK(m.central_moment(3) == 0);
    CHECK(m.raw_moment(2) == 5);
  }
  SUBCASE("1, 2, 3") {
    const ResidenceSample s({1, 2, 3}, std::nullopt);
    const auto m = sample_moments(s, 4);
    CHECK(m.raw_moment(1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(m.raw_moment(2) == doctest::Approx(14.0 / 3).epsilon(1e-15));
    CHECK(m.central_moment(2) == doctest::Approx(2.0 / 3).epsilon(1e-15));

    const auto e = sample_moments_exact(s, 4);
    CHECK(e.raw_moment(2) == Rational(14, 3));
    CHECK(e.central_moment(2) == Rational(2, 3));
    CHECK(e.central_moment(3) == 0);
    CHECK(e.central_moment(4) == Rational(2, 3));
  }
  CHECK_THROWS(sample_moments(ResidenceSample({1}, std::nullopt), 1));
}

TEST_CASE("sample central moments are well formed") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::int64_t> draw(1, 400);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::int64_t> steps(1 + trial % 37);
    for (auto& x : steps) x = draw(rng);
    double mean = 0;
    const auto c = sample_central_moments(steps, 16, mean);
    CHECK(c[0] == 1);
    CHECK(c[1] == 0);
    for (int m = 2; m <= 16; m += 2) CHECK(c[m] >= 0);

    const auto exact = sample_moments_exact(ResidenceSample(steps, std::nullopt), 6);
    for (int m = 2; m <= 6; ++m) {
      const double want = exact.central_moment(m).get_d();
      CHECK(std::abs(c[m] - want) <= 1e-10 * std::max(1.0, std::abs(want)) * std::pow(400.0, m - 2));
    }
  }
}

TEST_CASE("exact moments of the reference distributions") {
  const auto u = exact_moments(DiscreteUniform{1, 100}, 4);
  CHECK(u.mean == Rational(101, 2));
  CHECK(u.central_moment(2) == Rational(3333, 4));

  const auto g = exact_moments(ShiftedGeometric{Rational(1, 2)}, 4);
  CHECK(g.mean == 2);
  CHECK(g.central_moment(2) == 2);
  CHECK(g.raw_moment(2) == 6);

  const auto w = exact_moments(DiscreteUniform{93, 100}, 2);
  CHECK(w.central_moment(2) == Rational(21, 4));

  CHECK_THROWS_AS(exact_moments(DiscreteUniform{1, 2}, 17), DomainError);
}

TEST_CASE("geometric raw moments match series summation") {
  for (auto p : {Rational(1, 2), Rational(1, 20), Rational(3, 10)}) {
    const auto raw = exact_raw_moments(ShiftedGeometric{p}, 8);
    for (int order = 1; order <= 8; ++order) {
      const double series = oracle::geometric_raw_moment_by_summation(p.get_d(), order);
      CHECK(oracle::rel_diff(raw[order].get_d(), series) < 1e-10);
    }
  }
  CHECK(oracle::geometric_raw_moment_by_summation(0.5, 2) == doctest::Approx(6.0));
}

TEST_CASE("uniform central moments match direct summation") {
  for (auto [a, b] : {std::pair<std::int64_t, std::int64_t>{93, 100}, {1, 100}, {5, 5}, {1, 2}}) {
    const auto m = exact_moments(DiscreteUniform{a, b}, 16);
    const auto direct = oracle::uniform_central_by_summation(a, b, 16);
    for (int order = 2; order <= 16; ++order) {
      CHECK(m.central_moment(order) == direct[order]);
    }
  }
}

TEST_CASE("eulerian numbers") {
  CHECK(eulerian_row(0) == std::vector<BigInt>{1});
  CHECK(eulerian_row(3) == std::vector<BigInt>{1, 4, 1});
  CHECK(eulerian_row(4) == std::vector<BigInt>{1, 11, 11, 1});
  CHECK(eulerian_row(5) == std::vector<BigInt>{1, 26, 66, 26, 1});
}

TEST_CASE("raw and central transforms round trip") {
  for (const DistributionSpec& d :
       {DistributionSpec{ShiftedGeometric{Rational(1, 20)}}, DistributionSpec{DiscreteUniform{93, 100}}}) {
    const auto raw = exact_raw_moments(d, 16);
    const auto central = raw_to_central(raw);
    CHECK(central[0] == 1);
    CHECK(central[1] == 0);
    CHECK(central_to_raw(central, raw[1]) == raw);
  }
}

TEST_CASE("empirical moments agree with exact moments") {
  for (const DistributionSpec& d :
       {DistributionSpec{ShiftedGeometric{Rational(1, 2)}}, DistributionSpec{ShiftedGeometric{Rational(1, 20)}},
        DistributionSpec{DiscreteUniform{93, 100}}, DistributionSpec{DiscreteUniform{1, 100}}}) {
    auto rng = make_stream(99, 0);
    const std::size_t n = 1'000'000;
    const auto s = sample(d, n, rng);
    const auto raw = exact_raw_moments(d, 8);
    for (int order = 1; order <= 4; ++order) {
      // se of the sample mean of X^order is sqrt(Var(X^order) / n)
      const double mean = raw[order].get_d();
      const double var = raw[2 * order].get_d() - mean * mean;
      double acc = 0;
      for (auto x : s.steps()) acc += std::pow(static_cast<double>(x), order);
      CHECK(std::abs(acc / n - mean) <= 5 * std::sqrt(var / n));
    }
  }
}
