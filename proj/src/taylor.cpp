#include "mrt/taylor.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <mutex>

namespace mrt {

namespace {

BigInt factorial(int n) {
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

NPolynomial multiply(const NPolynomial& x, const NPolynomial& y) {
  NPolynomial out;
  for (const auto& [ex, cx] : x) {
    for (const auto& [ey, cy] : y) out[ex + ey] += cx * cy;
  }
  std::erase_if(out, [](const auto& kv) { return sgn(kv.second) == 0; });
  return out;
}

int pair_count(std::span<const int> multiplicities) {
  int p = 0;
  for (int a : multiplicities) p += a * (a - 1) / 2;
  return p;
}

template <class Scalar>
Scalar int_power(const Scalar& x, int n) {
  Scalar r(1);
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

Rational evaluate(const NPolynomial& p, const Rational& n) {
  Rational total(0);
  for (const auto& [e, c] : p) {
    const Rational base = e >= 0 ? n : Rational(1 / n);
    total += c * int_power(base, std::abs(e));
  }
  return total;
}

DerivativeCoefficient coefficient(std::span<const int> multiplicities,
                                  CoefficientForm form) {
  int k = 0;
  for (int a : multiplicities) {
    if (a < 1) throw DomainError("multiplicities must be positive");
    k += a;
  }
  if (k < 1) throw DomainError("derivative order must be >= 1");

  // (-1)^k N^-k mu^-(k-1) [ N (k-2)! P - k!/2 ]
  const Rational sign = k % 2 == 0 ? 1 : -1;
  DerivativeCoefficient c;
  c.mu_exponent = -(k - 1);
  const int pairs = pair_count(multiplicities);
  if (pairs > 0) {
    const int n_power = form == CoefficientForm::kDerived ? 1 - k : -k;
    c.poly[n_power] += sign * Rational(factorial(k - 2) * pairs);
  }
  c.poly[-k] -= sign * make_rational(factorial(k), 2);
  std::erase_if(c.poly, [](const auto& kv) { return sgn(kv.second) == 0; });
  return c;
}

Rational coefficient_value(std::span<const int> multiplicities, long n,
                           const Rational& mu, CoefficientForm form) {
  const auto c = coefficient(multiplicities, form);
  const Rational mu_part =
      c.mu_exponent >= 0 ? int_power(mu, c.mu_exponent)
                         : Rational(1 / int_power(mu, -c.mu_exponent));
  return evaluate(c.poly, Rational(n)) * mu_part;
}

std::vector<IndexPattern> enumerate_patterns(int k, int l) {
  if (k < 1 || l < 1) throw DomainError("pattern orders must be >= 1");
  std::vector<IndexPattern> out;
  std::vector<Slot> current;

  // Slots are emitted in non-decreasing order so each multiset appears once.
  auto recurse = [&](auto&& self, int rem_a, int rem_b, Slot min_slot) -> void {
    if (rem_a == 0 && rem_b == 0) {
      IndexPattern p(current);
      if (p.satisfies_conditions()) out.push_back(std::move(p));
      return;
    }
    for (int a = min_slot.a; a <= rem_a; ++a) {
      const int b_start = a == min_slot.a ? min_slot.b : 0;
      for (int b = b_start; b <= rem_b; ++b) {
        if (a + b < 2) continue;
        current.push_back({a, b});
        self(self, rem_a - a, rem_b - b, Slot{a, b});
        current.pop_back();
      }
    }
  };
  recurse(recurse, k, l, Slot{0, 0});
  return out;
}

std::vector<MomentMonomial> sigma_pattern(const IndexPattern& p) {
  std::map<int, int> joint;
  std::map<int, int> separate;
  bool joint_zero = false;
  bool separate_zero = false;
  auto add = [](std::map<int, int>& powers, bool& zero, int order) {
    if (order == 1) zero = true;
    if (order >= 2) ++powers[order];
  };
  for (const auto& s : p.slots()) {
    add(joint, joint_zero, s.a + s.b);
    add(separate, separate_zero, s.a);
    add(separate, separate_zero, s.b);
  }

  std::vector<MomentMonomial> out;
  if (!joint_zero) out.push_back({Rational(1), joint});
  if (!separate_zero) {
    if (!out.empty() && out.front().powers == separate) {
      out.clear();  // covariance of independent factors
    } else {
      out.push_back({Rational(-1), separate});
    }
  }
  return out;
}

NPolynomial pattern_count(const IndexPattern& p) {
  const auto& slots = p.slots();
  // falling factorial N (N-1) ... (N-d+1)
  NPolynomial count{{0, Rational(1)}};
  for (std::size_t j = 0; j < slots.size(); ++j) {
    count = multiply(count, NPolynomial{{1, Rational(1)},
                                        {0, Rational(-static_cast<long>(j))}});
  }
  BigInt num = factorial(p.k()) * factorial(p.l());
  BigInt den = 1;
  for (const auto& s : slots) den *= factorial(s.a) * factorial(s.b);
  // identical slots are interchangeable labels
  for (std::size_t i = 0; i < slots.size();) {
    std::size_t j = i;
    while (j < slots.size() && slots[j] == slots[i]) ++j;
    den *= factorial(static_cast<int>(j - i));
    i = j;
  }
  const Rational scale = make_rational(num, den);
  for (auto& [e, c] : count) c *= scale;
  return count;
}

VarianceExpression generate_block(int k, int l, CoefficientForm form) {
  VarianceExpression expr;
  expr.order = std::max(k, l);
  const Rational inv_fact = make_rational(1, factorial(k) * factorial(l));

  for (const auto& pattern : enumerate_patterns(k, l)) {
    const auto sigma = sigma_pattern(pattern);
    if (sigma.empty()) continue;
    std::vector<int> mult_a;
    std::vector<int> mult_b;
    for (const auto& s : pattern.slots()) {
      if (s.a > 0) mult_a.push_back(s.a);
      if (s.b > 0) mult_b.push_back(s.b);
    }
    const auto ca = coefficient(mult_a, form);
    const auto cb = coefficient(mult_b, form);
    auto n_poly = multiply(multiply(ca.poly, cb.poly), pattern_count(pattern));
    for (const auto& [e, c] : n_poly) {
      for (const auto& mono : sigma) {
        Term t;
        t.coef = c * mono.coef * inv_fact;
        t.n_exponent = -e;
        t.mu_exponent = ca.mu_exponent + cb.mu_exponent;
        t.moment_powers = mono.powers;
        expr.terms.push_back(std::move(t));
      }
    }
  }
  return normalize_expression(std::move(expr));
}

VarianceExpression generate_expression(int order, const GenerateOptions& opts) {
  if (order < 1) throw DomainError("expansion order must be >= 1");
  std::vector<std::pair<int, int>> blocks;
  for (int k = 1; k <= order; ++k) {
    for (int l = 1; l <= order; ++l) blocks.emplace_back(k, l);
  }
  std::vector<VarianceExpression> parts(blocks.size());
  const unsigned threads = std::max(1u, opts.threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      parts[i] = generate_block(blocks[i].first, blocks[i].second, opts.form);
    }
  } else {
    // Blocks are merged in a fixed order, so the schedule never leaks into
    // the result.
    std::vector<std::future<void>> pending;
    for (unsigned w = 0; w < threads; ++w) {
      pending.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < blocks.size(); i += threads) {
          parts[i] = generate_block(blocks[i].first, blocks[i].second, opts.form);
        }
      }));
    }
    for (auto& f : pending) f.get();
  }

  VarianceExpression expr;
  expr.order = order;
  for (auto& part : parts) {
    for (auto& t : part.terms) expr.terms.push_back(std::move(t));
  }
  expr = normalize_expression(std::move(expr));
  expr.order = order;
  return expr;
}

const VarianceExpression& cached_expression(int order) {
  static std::mutex mutex;
  static std::map<int, VarianceExpression> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, generate_expression(order)).first;
  return it->second;
}

namespace {

template <class Scalar>
Scalar from_rational(const Rational& q) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return q.get_d();
  } else {
    return q;
  }
}

template <class Scalar>
Scalar evaluate_impl(const VarianceExpression& expr, const MomentVector<Scalar>& mom,
                     long n) {
  if (n < 1) throw DomainError("sample size must be >= 1");
  const Scalar big_n(n);
  const Scalar inv_n = Scalar(1) / big_n;
  const Scalar inv_mu = Scalar(1) / mom.mean;
  Scalar total(0);
  for (const auto& t : expr.terms) {
    Scalar v = from_rational<Scalar>(t.coef);
    v *= int_power(inv_n, t.n_exponent);
    v *= t.mu_exponent >= 0 ? int_power(mom.mean, t.mu_exponent)
                            : int_power(inv_mu, -t.mu_exponent);
    for (const auto& [m, c] : t.moment_powers) v *= int_power(mom.central_moment(m), c);
    total += v;
  }
  return total;
}

}  // namespace

double evaluate_expression(const VarianceExpression& expr, const FloatMoments& mom,
                           long n) {
  return evaluate_impl<double>(expr, mom, n);
}

Rational evaluate_expression(const VarianceExpression& expr, const ExactMoments& mom,
                             long n) {
  Rational v = evaluate_impl<Rational>(expr, mom, n);
  v.canonicalize();
  return v;
}

CompiledExpression::CompiledExpression(const VarianceExpression& expr, long n) {
  if (n < 1) throw DomainError("sample size must be >= 1");
  std::map<std::pair<int, std::map<int, int>>, Rational> merged;
  const Rational inv_n(1, n);
  for (const auto& t : expr.terms) {
    merged[{t.mu_exponent, t.moment_powers}] += t.coef * int_power(inv_n, t.n_exponent);
  }
  for (const auto& [key, coef] : merged) {
    if (sgn(coef) == 0) continue;
    Monomial m{coef.get_d(), key.first, {key.second.begin(), key.second.end()}};
    for (const auto& [order, power] : m.powers) {
      max_order_ = std::max(max_order_, order);
      max_power_ = std::max(max_power_, power);
    }
    min_mu_exponent_ = std::min(min_mu_exponent_, m.mu_exponent);
    monomials_.push_back(std::move(m));
  }
}

double CompiledExpression::operator()(double mean, std::span<const double> central) const {
  if (static_cast<int>(central.size()) <= max_order_) {
    throw DomainError("compiled expression needs central moments up to order " +
                      std::to_string(max_order_));
  }
  // table[m][c] = mu_m^c
  const int width = max_power_ + 1;
  std::vector<double> table(static_cast<std::size_t>((max_order_ + 1) * width), 1.0);
  for (int m = 2; m <= max_order_; ++m) {
    for (int c = 1; c < width; ++c) table[m * width + c] = table[m * width + c - 1] * central[m];
  }
  std::vector<double> inv_mu(static_cast<std::size_t>(-min_mu_exponent_) + 1, 1.0);
  for (std::size_t g = 1; g < inv_mu.size(); ++g) inv_mu[g] = inv_mu[g - 1] / mean;

  double total = 0;
  for (const auto& mono : monomials_) {
    double v = mono.coef;
    v *= mono.mu_exponent <= 0 ? inv_mu[static_cast<std::size_t>(-mono.mu_exponent)]
                               : std::pow(mean, mono.mu_exponent);
    for (const auto& [m, c] : mono.powers) v *= table[m * width + c];
    total += v;
  }
  return total;
}

double CompiledExpression::operator()(const FloatMoments& mom) const {
  std::vector<double> central(static_cast<std::size_t>(max_order_) + 1, 0.0);
  for (int m = 2; m <= max_order_; ++m) central[m] = mom.central_moment(m);
  return (*this)(mom.mean, central);
}

double brute_force_truncated_variance(const FloatMoments& mom, int n, int order) {
  if (n < 1 || n > 6 || order < 1 || order > 4) {
    throw DomainError("brute force variance is limited to 1 <= N <= 6, 1 <= M <= 4");
  }
  const double mu = mom.mean;
  auto derivative = [&](const std::vector<int>& idx) {
    const int k = static_cast<int>(idx.size());
    int pairs = 0;
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) pairs += idx[a] == idx[b] ? 1 : 0;
    }
    const double kf = std::tgamma(k + 1.0);
    const double bracket =
        (k >= 2 ? n * std::tgamma(k - 1.0) * pairs : 0.0) - kf / 2.0;
    return (k % 2 == 0 ? 1.0 : -1.0) * bracket /
           (std::pow(static_cast<double>(n), k) * std::pow(mu, k - 1));
  };

  double total = 0;
  for (int k = 1; k <= order; ++k) {
    for (int l = 1; l <= order; ++l) {
      const int len = k + l;
      std::vector<int> tuple(static_cast<std::size_t>(len), 0);
      const double norm = std::tgamma(k + 1.0) * std::tgamma(l + 1.0);
      while (true) {
        std::vector<int> first(tuple.begin(), tuple.begin() + k);
        std::vector<int> second(tuple.begin() + k, tuple.end());
        std::vector<int> count_i(static_cast<std::size_t>(n), 0);
        std::vector<int> count_j(static_cast<std::size_t>(n), 0);
        for (int i : first) ++count_i[i];
        for (int j : second) ++count_j[j];
        double joint = 1;
        double prod_i = 1;
        double prod_j = 1;
        for (int v = 0; v < n; ++v) {
          joint *= mom.central_moment(count_i[v] + count_j[v]);
          prod_i *= mom.central_moment(count_i[v]);
          prod_j *= mom.central_moment(count_j[v]);
        }
        const double sigma = joint - prod_i * prod_j;
        if (sigma != 0) total += derivative(first) * derivative(second) * sigma / norm;

        int pos = len - 1;
        while (pos >= 0 && ++tuple[pos] == n) tuple[pos--] = 0;
        if (pos < 0) break;
      }
    }
  }
  return total;
}

}  // namespace mrt
