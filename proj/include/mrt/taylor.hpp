#pragma once

#include <map>
#include <span>
#include <vector>

#include "mrt/core.hpp"

namespace mrt {

/// Laurent polynomial in N: exponent of N -> coefficient.
using NPolynomial = std::map<int, Rational>;

Rational evaluate(const NPolynomial& p, const Rational& n);

/// Which bracket to use for the k-th partial derivative of the mrT
/// statistic at the mean. kDerived is  [N (k-2)! P - k!/2];  kPrintedDisplay
/// drops the factor N on the pair-count term and is kept only so the two
/// can be compared.
enum class CoefficientForm { kDerived, kPrintedDisplay };

/// k-th partial derivative of f_N at x = (mu, ..., mu) for an index tuple
/// whose distinct indices repeat `multiplicities` times:
///   value = mu^mu_exponent * sum_e poly[e] N^e.
struct DerivativeCoefficient {
  int mu_exponent = 0;
  NPolynomial poly;
};

DerivativeCoefficient coefficient(std::span<const int> multiplicities,
                                  CoefficientForm form = CoefficientForm::kDerived);

/// Numeric value of `coefficient` at given N and mu.
Rational coefficient_value(std::span<const int> multiplicities, long n,
                           const Rational& mu,
                           CoefficientForm form = CoefficientForm::kDerived);

/// All canonical patterns with sum a = k, sum b = l that survive the
/// pruning rules (every index repeated, at least one shared index).
std::vector<IndexPattern> enumerate_patterns(int k, int l);

/// One monomial of a covariance: coef * prod mu_m^c_m.
struct MomentMonomial {
  Rational coef;
  std::map<int, int> powers;
};

/// prod mu_(a+b) - prod mu_a * prod mu_b with mu_0 = 1, mu_1 = 0.
/// Zero monomials are omitted; an empty result means the covariance is 0.
std::vector<MomentMonomial> sigma_pattern(const IndexPattern& p);

/// Number of ordered index-tuple pairs over labels 1..N realizing p.
NPolynomial pattern_count(const IndexPattern& p);

/// Contribution of derivative orders (k, l) to the variance expansion.
VarianceExpression generate_block(int k, int l,
                                  CoefficientForm form = CoefficientForm::kDerived);

struct GenerateOptions {
  CoefficientForm form = CoefficientForm::kDerived;
  unsigned threads = 1;
};

/// Truncated variance expansion with all k, l <= order, normalized.
VarianceExpression generate_expression(int order, const GenerateOptions& opts = {});

/// Process-wide cache of generate_expression(order) in the derived form.
const VarianceExpression& cached_expression(int order);

/// Substitutes moments and N. Throws DomainError on a missing moment order
/// or N < 1.
double evaluate_expression(const VarianceExpression& expr, const FloatMoments& mom,
                           long n);
Rational evaluate_expression(const VarianceExpression& expr, const ExactMoments& mom,
                             long n);

/// Expression collapsed for a fixed N, for repeated float evaluation.
class CompiledExpression {
 public:
  CompiledExpression(const VarianceExpression& expr, long n);

  int max_central_order() const { return max_order_; }

  /// `central[m]` holds mu_m for 2 <= m <= max_central_order().
  double operator()(double mean, std::span<const double> central) const;
  double operator()(const FloatMoments& mom) const;

 private:
  struct Monomial {
    double coef;
    int mu_exponent;
    std::vector<std::pair<int, int>> powers;
  };
  std::vector<Monomial> monomials_;
  int max_order_ = 1;
  int min_mu_exponent_ = 0;
  int max_power_ = 0;
};

/// Direct evaluation of the truncated double sum over every index tuple,
/// without grouping into patterns. Limited to N <= 6 and order <= 4.
double brute_force_truncated_variance(const FloatMoments& mom, int n, int order);

}  // namespace mrt
