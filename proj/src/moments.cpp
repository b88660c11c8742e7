#include "mrt/moments.hpp"

#include <algorithm>
#include <cmath>

namespace mrt {

namespace {

constexpr int kMaxRawStored = 4;
constexpr int kMaxExactCentral = 16;

BigInt binomial(int n, int k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return r;
}

Rational power(const Rational& x, int n) {
  Rational r(1);
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

void check_order(int max_central_order) {
  if (max_central_order < 2) {
    throw DomainError("maximum central moment order must be >= 2");
  }
}

}  // namespace

std::vector<double> sample_central_moments(std::span<const std::int64_t> steps,
                                           int max_order, double& mean) {
  if (steps.empty()) throw EmptySampleError("sample moments of an empty sample");
  const double n = static_cast<double>(steps.size());
  // integer sum is exact for any realistic sample
  unsigned __int128 sum = 0;
  for (auto x : steps) sum += static_cast<unsigned __int128>(x);
  mean = static_cast<double>(sum) / n;

  std::vector<double> central(static_cast<std::size_t>(std::max(max_order, 1)) + 1, 0.0);
  for (auto xi : steps) {
    const double d = static_cast<double>(xi) - mean;
    double q = d * d;
    for (int m = 2; m <= max_order; ++m, q *= d) central[m] += q;
  }
  central[0] = 1.0;
  central[1] = 0.0;
  for (int m = 2; m <= max_order; ++m) central[m] /= n;
  return central;
}

FloatMoments sample_moments(const ResidenceSample& s, int max_central_order) {
  check_order(max_central_order);
  double mean = 0;
  const auto central = sample_central_moments(s.steps(), max_central_order, mean);

  std::vector<double> raw(kMaxRawStored + 1, 0.0);
  for (auto xi : s.steps()) {
    const double x = static_cast<double>(xi);
    double p = x;
    for (int k = 1; k <= kMaxRawStored; ++k, p *= x) raw[k] += p;
  }

  FloatMoments out;
  out.mean = mean;
  const double n = static_cast<double>(s.size());
  for (int k = 1; k <= kMaxRawStored; ++k) out.raw[k] = raw[k] / n;
  out.raw[1] = mean;
  for (int m = 2; m <= max_central_order; ++m) out.central[m] = central[m];
  return out;
}

ExactMoments sample_moments_exact(const ResidenceSample& s, int max_central_order) {
  check_order(max_central_order);
  if (s.size() == 0) throw EmptySampleError("sample moments of an empty sample");
  const Rational n(static_cast<unsigned long>(s.size()));

  BigInt sum = 0;
  for (auto x : s.steps()) sum += static_cast<long>(x);
  Rational mean(sum, BigInt(static_cast<unsigned long>(s.size())));
  mean.canonicalize();

  std::vector<BigInt> raw(kMaxRawStored + 1, 0);
  std::vector<Rational> central(static_cast<std::size_t>(max_central_order) + 1, 0);
  for (auto xi : s.steps()) {
    const BigInt x(static_cast<long>(xi));
    BigInt p = x;
    for (int k = 1; k <= kMaxRawStored; ++k, p *= x) raw[k] += p;
    const Rational d = Rational(x) - mean;
    Rational q = d * d;
    for (int m = 2; m <= max_central_order; ++m, q *= d) central[m] += q;
  }

  ExactMoments out;
  out.mean = mean;
  for (int k = 1; k <= kMaxRawStored; ++k) {
    Rational v(raw[k]);
    v /= n;
    out.raw[k] = v;
  }
  for (int m = 2; m <= max_central_order; ++m) {
    Rational v = central[m] / n;
    v.canonicalize();
    out.central[m] = v;
  }
  return out;
}

std::vector<BigInt> eulerian_row(int n) {
  std::vector<BigInt> row{1};  // A_0
  for (int r = 1; r <= n; ++r) {
    std::vector<BigInt> next(static_cast<std::size_t>(r), 0);
    for (int m = 0; m < r; ++m) {
      if (m >= 1) next[m] += (r - m) * row[m - 1];
      if (m < static_cast<int>(row.size()) && r > 1) next[m] += (m + 1) * row[m];
    }
    if (r == 1) next[0] = 1;
    row = std::move(next);
  }
  return row;
}

std::vector<Rational> exact_raw_moments(const DistributionSpec& d, int max_order) {
  validate(d);
  std::vector<Rational> raw(static_cast<std::size_t>(max_order) + 1);
  raw[0] = 1;
  if (const auto* g = std::get_if<ShiftedGeometric>(&d)) {
    // E[X^n] = A_n(1 - p) / p^n
    const Rational q = 1 - g->p;
    for (int n = 1; n <= max_order; ++n) {
      const auto row = eulerian_row(n);
      Rational poly(0);
      Rational qpow(1);
      for (const auto& c : row) {
        poly += Rational(c) * qpow;
        qpow *= q;
      }
      Rational v = poly / power(g->p, n);
      v.canonicalize();
      raw[n] = v;
    }
    return raw;
  }
  const auto& u = std::get<DiscreteUniform>(d);
  std::vector<BigInt> sums(static_cast<std::size_t>(max_order) + 1, 0);
  for (std::int64_t x = u.a; x <= u.b; ++x) {
    const BigInt bx(static_cast<long>(x));
    BigInt p = bx;
    for (int n = 1; n <= max_order; ++n, p *= bx) sums[n] += p;
  }
  const BigInt count(static_cast<long>(u.b - u.a + 1));
  for (int n = 1; n <= max_order; ++n) {
    Rational v(sums[n], count);
    v.canonicalize();
    raw[n] = v;
  }
  return raw;
}

std::vector<Rational> raw_to_central(const std::vector<Rational>& raw) {
  std::vector<Rational> central(raw.size());
  if (raw.empty()) return central;
  const Rational mean = raw.size() > 1 ? raw[1] : Rational(0);
  const Rational neg = -mean;
  for (std::size_t m = 0; m < raw.size(); ++m) {
    Rational acc(0);
    for (std::size_t j = 0; j <= m; ++j) {
      acc += Rational(binomial(static_cast<int>(m), static_cast<int>(j))) * raw[j] *
             power(neg, static_cast<int>(m - j));
    }
    acc.canonicalize();
    central[m] = acc;
  }
  return central;
}

std::vector<Rational> central_to_raw(const std::vector<Rational>& central,
                                     const Rational& mean) {
  std::vector<Rational> raw(central.size());
  for (std::size_t n = 0; n < central.size(); ++n) {
    Rational acc(0);
    for (std::size_t j = 0; j <= n; ++j) {
      const Rational cj = j == 1 ? Rational(0) : central[j];
      acc += Rational(binomial(static_cast<int>(n), static_cast<int>(j))) * cj *
             power(mean, static_cast<int>(n - j));
    }
    acc.canonicalize();
    raw[n] = acc;
  }
  return raw;
}

ExactMoments exact_moments(const DistributionSpec& d, int max_central_order) {
  check_order(max_central_order);
  if (max_central_order > kMaxExactCentral) {
    throw DomainError("exact moments are limited to central order 16");
  }
  const int top = std::max(max_central_order, kMaxRawStored);
  const auto raw = exact_raw_moments(d, top);
  const auto central = raw_to_central(raw);

  ExactMoments out;
  out.mean = raw[1];
  for (int n = 1; n <= kMaxRawStored; ++n) out.raw[n] = raw[n];
  for (int m = 2; m <= max_central_order; ++m) out.central[m] = central[m];
  return out;
}

}  // namespace mrt
