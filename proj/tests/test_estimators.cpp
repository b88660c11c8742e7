#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mrt/estimators.hpp"
#include "mrt/mc.hpp"
#include "mrt/moments.hpp"
#include "oracles.hpp"

using namespace mrt;

namespace {

ResidenceSample steps(std::vector<std::int64_t> v, std::optional<double> dt = std::nullopt) {
  return ResidenceSample(std::move(v), dt);
}

}  // namespace

TEST_CASE("mean residual steps") {
  CHECK(mean_residual_steps(steps({1, 1, 1})) == 1);
  CHECK(mean_residual_steps(steps({7})) == 4);
  CHECK(mean_residual_steps(steps({1, 2, 3})) == doctest::Approx(5.0 / 3).epsilon(1e-15));
  CHECK(mean_residual_steps_exact(steps({1, 2, 3})) == Rational(5, 3));
  CHECK(mean_residual_steps_exact(steps({8})) == Rational(9, 2));
  CHECK_THROWS_AS(mean_residual_steps(std::span<const std::int64_t>{}), EmptySampleError);
}

TEST_CASE("mean residual steps survives large sums of squares") {
  // 2^62-scale squares overflow 64-bit accumulation
  const std::int64_t big = 3'000'000'000LL;
  const auto s = steps(std::vector<std::int64_t>(4, big));
  CHECK(mean_residual_steps(s) == doctest::Approx(0.5 + big / 2.0).epsilon(1e-15));
  CHECK(mean_residual_steps_exact(s) == Rational(1, 2) + Rational(big, 2));
}

TEST_CASE("mean residence and its variance") {
  CHECK(mean_residence_steps(steps({2, 2, 2})) == 2);
  CHECK(var_mean_residence(steps({2, 2, 2})) == 0);
  CHECK(mean_residence_steps(steps({1, 3})) == 2);
  CHECK(var_mean_residence(steps({1, 3})) == 1);
  CHECK(var_mean_residence(steps({1, 2, 3})) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK_THROWS_AS(var_mean_residence(steps({4})), DomainError);
}

TEST_CASE("ratio estimator") {
  const auto u = exact_moments(DiscreteUniform{93, 100}, 2);
  CHECK(to_decimal(var_mrt_ratio(u, 10), 16) == "0.1311584285189072");
  const auto g = exact_moments(ShiftedGeometric{Rational(1, 20)}, 2);
  CHECK(var_mrt_ratio(g, 30) == Rational(247, 10));

  CHECK(var_mrt_ratio(steps({6, 6, 6, 6})) == 0);

  // the stable sample form equals the raw-moment form
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::int64_t> draw(1, 300);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> v(2 + trial);
    for (auto& x : v) x = draw(rng);
    const auto s = steps(v);
    const auto exact = var_mrt_ratio(sample_moments_exact(s, 2), static_cast<long>(v.size()));
    CHECK(oracle::rel_diff(var_mrt_ratio(s), exact.get_d()) < 1e-12);
  }
}

TEST_CASE("taylor estimator on samples") {
  for (int order = 1; order <= 8; ++order) {
    CHECK(var_mrt_taylor(steps({5, 5, 5}), order) == 0);
  }
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::int64_t> draw(1, 60);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::int64_t> v(1 + trial * 3);
    for (auto& x : v) x = draw(rng);
    const auto s = steps(v);
    const auto m = sample_moments(s, 2);
    CHECK(oracle::rel_diff(var_mrt_taylor(s, 1), m.central.at(2) / (4.0 * v.size())) < 1e-14);
  }
  CHECK_THROWS_AS(var_mrt_taylor(steps({1, 2}), 0), DomainError);
}

TEST_CASE("estimators are invariant under reordering") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> draw(1, 90);
  std::vector<std::int64_t> v(40);
  for (auto& x : v) x = draw(rng);
  auto w = v;
  std::reverse(w.begin(), w.end());
  std::shuffle(w.begin(), w.end(), rng);
  CHECK(mean_residual_steps_exact(steps(v)) == mean_residual_steps_exact(steps(w)));
  CHECK(oracle::rel_diff(var_mrt_ratio(steps(v)), var_mrt_ratio(steps(w))) < 1e-14);
  CHECK(oracle::rel_diff(var_mrt_taylor(steps(v), 8), var_mrt_taylor(steps(w), 8)) < 1e-12);
  CHECK(oracle::rel_diff(var_mean_residence(steps(v)), var_mean_residence(steps(w))) < 1e-14);
}

TEST_CASE("estimators are nonnegative and f_N is at least one") {
  for (const DistributionSpec& d :
       {DistributionSpec{ShiftedGeometric{Rational(1, 2)}}, DistributionSpec{ShiftedGeometric{Rational(1, 20)}},
        DistributionSpec{DiscreteUniform{1, 100}}, DistributionSpec{DiscreteUniform{93, 100}}}) {
    for (std::size_t n : {1, 2, 3, 5, 30, 158}) {
      for (std::uint64_t rep = 0; rep < 200; ++rep) {
        auto rng = make_stream(n, rep);
        const auto s = sample(d, n, rng);
        CHECK(mean_residual_steps(s) >= 1);
        CHECK(var_mrt_ratio(s) >= 0);
        CHECK(var_mrt_taylor(s, 8) >= 0);
      }
    }
  }
}

TEST_CASE("inspection paradox identity") {
  CHECK(inspection_identity_check(steps({1, 2, 3})) < 1e-15);
  CHECK(inspection_identity_check_exact(steps({5})) == 0);
  CHECK(inspection_identity_check_exact(steps({1, 2, 3})) == 0);

  double worst = 0;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    auto rng = make_stream(77, rep);
    const auto s = sample(ShiftedGeometric{Rational(1, 10)}, 1 + rep % 500, rng);
    worst = std::max(worst, inspection_identity_check(s));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("autocorrelation") {
  std::vector<std::int64_t> alternating;
  for (int i = 0; i < 20; ++i) alternating.push_back(1 + i % 2);
  const auto alt = rt_autocorrelation({alternating}, 2);
  REQUIRE(alt.rows.size() == 3);
  CHECK(alt.rows[0].mean_r == doctest::Approx(1.0));
  CHECK(alt.rows[1].mean_r == doctest::Approx(-0.95));
  CHECK(alt.rows[1].mean_r < -0.9);
  CHECK(alt.rows[1].sd_r == 0);

  const auto zero = rt_autocorrelation({{1, 5, 2}, {3, 4}}, 0);
  CHECK(zero.used_traces == 2);
  CHECK(zero.rows[0].mean_r == 1);
  CHECK(zero.rows[0].sd_r == 0);

  const auto mixed = rt_autocorrelation({{1, 2, 3, 4}, {2, 2, 2, 2}, {1, 2}}, 1);
  CHECK(mixed.used_traces == 1);
  CHECK(mixed.constant_traces == 1);
  CHECK(mixed.short_traces == 1);

  CHECK_THROWS_AS(rt_autocorrelation({{2, 2, 2}}, 1), DomainError);
  CHECK_THROWS_AS(rt_autocorrelation({}, 1), DomainError);
  CHECK_THROWS_AS(rt_autocorrelation({{1, 2, 3}}, -1), DomainError);

  // independent draws: lag-1 correlation centred on zero
  std::vector<std::vector<std::int64_t>> traces;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    auto rng = make_stream(31, t);
    traces.push_back(sample(ShiftedGeometric{Rational(1, 5)}, 100, rng).steps());
  }
  const auto iid = rt_autocorrelation(traces, 3);
  CHECK(iid.used_traces == 1000);
  for (int h = 1; h <= 3; ++h) {
    const auto& row = iid.rows[h];
    // the normalized estimator has a -1/n bias
    CHECK(std::abs(row.mean_r) <= 5 * row.sd_r / std::sqrt(1000.0) + 0.01);
  }
}

TEST_CASE("report") {
  const auto r = build_report(steps({1, 2, 3}, 0.1), {});
  CHECK(r.n == 3);
  CHECK(*r.mrt_time == doctest::Approx(5.0 / 3 * 0.1).epsilon(1e-15));
  CHECK(*r.mean_residence_time == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(*r.mean_residence_var_time == doctest::Approx(0.01 / 3).epsilon(1e-14));
  REQUIRE(r.mrt_variance.size() == 2);
  CHECK(method_label(r.mrt_variance[0].method, r.mrt_variance[0].order) == "ratio");
  CHECK(method_label(r.mrt_variance[1].method, r.mrt_variance[1].order) == "taylor8");
  for (const auto& m : r.mrt_variance) {
    CHECK(oracle::rel_diff(m.sd_steps * m.sd_steps, m.var_steps) < 1e-15);
    CHECK(oracle::rel_diff(*m.var_time, m.var_steps * 0.01) < 1e-15);
    CHECK(oracle::rel_diff(*m.sd_time, m.sd_steps * 0.1) < 1e-15);
  }

  const auto plain = build_report(steps({4}), {true, false, 8});
  CHECK_FALSE(plain.dt);
  CHECK_FALSE(plain.mrt_time);
  CHECK_FALSE(plain.mean_residence_var_steps);
  REQUIRE(plain.mrt_variance.size() == 1);
  CHECK_FALSE(plain.mrt_variance[0].var_time);

  const auto t3 = build_report(steps({1, 2, 3, 9}), {false, true, 3});
  REQUIRE(t3.mrt_variance.size() == 1);
  CHECK(t3.mrt_variance[0].order == 3);
}
