#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "mrt/trace.hpp"

using namespace mrt;

namespace {

OccupancyTrace bits(std::vector<std::uint8_t> v) { return OccupancyTrace{std::move(v)}; }

OccupancyTrace from_mask(unsigned mask, int length) {
  OccupancyTrace t;
  for (int i = 0; i < length; ++i) t.bits.push_back((mask >> i) & 1u);
  return t;
}

const ExtractionPolicy kDrop{BoundaryPolicy::kDropCensored};
const ExtractionPolicy kInclude{BoundaryPolicy::kIncludeCensored};

}  // namespace

TEST_CASE("parse traces") {
  std::istringstream in("1 1 0\n0 1\n");
  auto traces = parse_traces(in);
  REQUIRE(traces.size() == 2);
  CHECK(traces[0] == bits({1, 1, 0}));
  CHECK(traces[1] == bits({0, 1}));

  std::istringstream empty("");
  CHECK(parse_traces(empty).empty());

  std::istringstream blank("\n1 0\n\n  \n0\n");
  CHECK(parse_traces(blank).size() == 2);

  std::istringstream bad("1 2 0");
  try {
    parse_traces(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }

  std::istringstream bad2("1 0\n0 1 x\n");
  try {
    parse_traces(bad2);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("filter examples") {
  CHECK(filter_transient_escapes(bits({1, 0, 0, 1}), {3}) == bits({1, 1, 1, 1}));
  CHECK(filter_transient_escapes(bits({1, 0, 0, 1}), {2}) == bits({1, 0, 0, 1}));
  for (int k = 1; k <= 6; ++k) {
    CHECK(filter_transient_escapes(bits({0, 0, 1, 1, 0}), {k}) == bits({0, 0, 1, 1, 0}));
  }
  CHECK(filter_transient_escapes(bits({}), {4}).bits.empty());
  CHECK(filter_transient_escapes(bits({1, 0, 1, 0, 0, 1, 0}), {2}) ==
        bits({1, 1, 1, 0, 0, 1, 0}));
}

TEST_CASE("filter k from times") {
  CHECK(FilterConfig::from_times(2.0, 0.1).k == 20);
  CHECK(FilterConfig::from_times(0.26, 0.1).k == 3);
  CHECK(FilterConfig::from_times(0.1, 0.1).k == 1);
  CHECK_THROWS_AS(FilterConfig::from_times(0.01, 0.1), DomainError);
  CHECK_THROWS_AS(FilterConfig::from_times(1.0, 0.0), DomainError);
}

TEST_CASE("filter properties hold exhaustively for short traces") {
  for (int length = 0; length <= 12; ++length) {
    for (unsigned mask = 0; mask < (1u << length); ++mask) {
      const auto x = from_mask(mask, length);
      for (int k = 1; k <= 5; ++k) {
        const FilterConfig cfg{k};
        const auto y = filter_transient_escapes(x, cfg);
        REQUIRE(y.size() == x.size());
        CHECK(filter_transient_escapes(y, cfg) == y);
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (x.bits[i]) CHECK(y.bits[i] == 1);
        }
        CHECK(filter_by_convolution(x, cfg) == y);
        if (k == 1) CHECK(y == x);
      }
    }
  }
}

TEST_CASE("filter construction agrees on random long traces") {
  std::mt19937_64 rng(2024);
  std::bernoulli_distribution one(0.6);
  std::uniform_int_distribution<int> len(0, 64);
  for (int trial = 0; trial < 2000; ++trial) {
    OccupancyTrace x;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) x.bits.push_back(one(rng));
    for (int k = 1; k <= 8; ++k) {
      CHECK(filter_by_convolution(x, {k}) == filter_transient_escapes(x, {k}));
    }
  }
}

TEST_CASE("extract residences") {
  const auto t = bits({0, 1, 1, 0, 1, 1, 1, 0});
  CHECK(extract_residences(t, kDrop) == std::vector<std::int64_t>{2, 3});
  CHECK(extract_residences(t, kInclude) == std::vector<std::int64_t>{2, 3});

  CHECK(extract_residences(bits({1, 1, 0, 1}), kDrop).empty());
  CHECK(extract_residences(bits({1, 1, 0, 1}), kInclude) == std::vector<std::int64_t>{2, 1});
  CHECK(extract_residences(bits({0, 0, 0}), kInclude).empty());
  CHECK(extract_residences(bits({}), kInclude).empty());
  CHECK(extract_residences(bits({1}), kInclude) == std::vector<std::int64_t>{1});
}

TEST_CASE("included residences account for every occupied step") {
  for (int length = 0; length <= 12; ++length) {
    for (unsigned mask = 0; mask < (1u << length); ++mask) {
      const auto x = from_mask(mask, length);
      const auto rts = extract_residences(x, kInclude);
      CHECK(std::accumulate(rts.begin(), rts.end(), std::int64_t{0}) ==
            std::count(x.bits.begin(), x.bits.end(), 1));
    }
  }
}

TEST_CASE("collect sample") {
  const std::vector<OccupancyTrace> traces{bits({1, 0, 1}), bits({0, 1, 1, 0})};
  CHECK(collect_sample(traces, {1}, kInclude).steps() == std::vector<std::int64_t>{1, 1, 2});
  CHECK(collect_sample(traces, {2}, kInclude).steps() == std::vector<std::int64_t>{3, 2});

  // the run of [0,1,0] touches neither end, so both policies keep it
  const std::vector<OccupancyTrace> single{bits({0, 1, 0})};
  CHECK(collect_sample(single, {1}, kInclude).steps() == std::vector<std::int64_t>{1});
  CHECK(collect_sample(single, {1}, kDrop).steps() == std::vector<std::int64_t>{1});
  const std::vector<OccupancyTrace> edges{bits({1, 0, 1})};
  CHECK(collect_sample(edges, {1}, kInclude).steps() == std::vector<std::int64_t>{1, 1});
  CHECK_THROWS_AS(collect_sample(edges, {1}, kDrop), EmptySampleError);
  CHECK_THROWS_AS(collect_sample({}, {1}, kDrop), EmptySampleError);

  const auto s = collect_sample(traces, {1}, kInclude, 0.25);
  CHECK(*s.dt() == 0.25);
}

TEST_CASE("collect sample is invariant under trace order and thread count") {
  std::mt19937_64 rng(5);
  std::bernoulli_distribution one(0.7);
  std::vector<OccupancyTrace> traces(40);
  for (auto& t : traces) {
    for (int i = 0; i < 200; ++i) t.bits.push_back(one(rng));
  }
  const FilterConfig cfg{3};
  auto base = collect_sample(traces, cfg, kDrop).steps();
  CHECK(collect_sample(traces, cfg, kDrop, std::nullopt, 4).steps() == base);
  CHECK(residences_per_trace(traces, cfg, kDrop, 3) == residences_per_trace(traces, cfg, kDrop, 1));

  std::shuffle(traces.begin(), traces.end(), rng);
  auto shuffled = collect_sample(traces, cfg, kDrop).steps();
  std::sort(base.begin(), base.end());
  std::sort(shuffled.begin(), shuffled.end());
  CHECK(base == shuffled);
}

TEST_CASE("steps csv") {
  std::ostringstream out;
  write_steps_csv(out, {3, 1, 4});
  CHECK(out.str() == "steps\n3\n1\n4\n");

  std::istringstream in(out.str());
  CHECK(read_steps_csv(in) == std::vector<std::int64_t>{3, 1, 4});
  std::istringstream headless("5\n6\n");
  CHECK(read_steps_csv(headless) == std::vector<std::int64_t>{5, 6});
  std::istringstream bad("steps\n5\nfoo\n");
  CHECK_THROWS_AS(read_steps_csv(bad), ParseError);
}
