#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace mrt {

using Rational = mpq_class;
using BigInt = mpz_class;

/// num/den in canonical form (GMP arithmetic requires canonical operands).
inline Rational make_rational(const BigInt& num, const BigInt& den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Error hierarchy. The CLI maps ParseError to a usage failure and every
// other Error to a domain failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class EmptySampleError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Residence durations in time-step units plus an optional time step.
class ResidenceSample {
 public:
  ResidenceSample() = default;
  /// Throws DomainError if any step is < 1, EmptySampleError if empty.
  explicit ResidenceSample(std::vector<std::int64_t> steps,
                           std::optional<double> dt = std::nullopt);

  const std::vector<std::int64_t>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  const std::optional<double>& dt() const { return dt_; }

  bool operator==(const ResidenceSample&) const = default;

 private:
  std::vector<std::int64_t> steps_;
  std::optional<double> dt_;
};

/// Binary occupancy sequence for one particle (1 = inside the region).
struct OccupancyTrace {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  bool operator==(const OccupancyTrace&) const = default;
};

/// Mean, central moments mu_2..mu_M2 and raw moments m'_1..m'_4 of a
/// distribution or sample. Instantiated for Rational (exact) and double.
template <class Scalar>
struct MomentVector {
  static constexpr bool exact = std::is_same_v<Scalar, Rational>;

  Scalar mean{};
  std::map<int, Scalar> central;  // order -> mu_m, 2 <= m
  std::map<int, Scalar> raw;      // order -> m'_n, 1 <= n <= 4

  int max_central_order() const {
    return central.empty() ? 1 : central.rbegin()->first;
  }

  /// mu_m with mu_0 = 1 and mu_1 = 0; throws DomainError when missing.
  Scalar central_moment(int order) const {
    if (order == 0) return Scalar(1);
    if (order == 1) return Scalar(0);
    auto it = central.find(order);
    if (it == central.end()) {
      throw DomainError("central moment of order " + std::to_string(order) +
                        " is not available");
    }
    return it->second;
  }

  Scalar raw_moment(int order) const {
    auto it = raw.find(order);
    if (it == raw.end()) {
      throw DomainError("raw moment of order " + std::to_string(order) +
                        " is not available");
    }
    return it->second;
  }

  bool operator==(const MomentVector&) const = default;
};

using ExactMoments = MomentVector<Rational>;
using FloatMoments = MomentVector<double>;

FloatMoments to_float(const ExactMoments& m);

/// One monomial  coef * N^-n_exponent * mu^mu_exponent * prod mu_m^c_m.
struct Term {
  Rational coef;
  int n_exponent = 0;
  int mu_exponent = 0;
  std::map<int, int> moment_powers;  // central order m >= 2 -> power c_m

  int moment_order() const;
  bool same_monomial(const Term& o) const {
    return n_exponent == o.n_exponent && mu_exponent == o.mu_exponent &&
           moment_powers == o.moment_powers;
  }
  bool operator==(const Term&) const = default;
};

/// Sort key for terms: N exponent, then mu exponent, then moment powers.
bool monomial_less(const Term& a, const Term& b);

struct VarianceExpression {
  int order = 0;
  std::vector<Term> terms;

  bool operator==(const VarianceExpression&) const = default;
};

/// Merges like terms, drops zero coefficients and zero powers, and sorts
/// terms into the stable (e, g, moment_powers) order.
VarianceExpression normalize_expression(VarianceExpression expr);

/// Renders e.g. "1/4 * N^-1 * mu2".
std::string to_text(const Term& t);
std::string to_text(const VarianceExpression& expr);

/// Multiplicities (a_r, b_r) of one distinct index in the two index sets.
struct Slot {
  int a = 0;
  int b = 0;
  auto operator<=>(const Slot&) const = default;
};

/// Canonical class of index-tuple pairs, identified by per-index
/// multiplicities in each set. Slots are kept sorted.
class IndexPattern {
 public:
  IndexPattern() = default;
  explicit IndexPattern(std::vector<Slot> slots);

  const std::vector<Slot>& slots() const { return slots_; }
  int k() const;
  int l() const;

  /// Every slot has a + b >= 2 and at least one slot is shared.
  bool satisfies_conditions() const;

  bool operator==(const IndexPattern&) const = default;
  auto operator<=>(const IndexPattern&) const = default;

 private:
  std::vector<Slot> slots_;
};

struct ShiftedGeometric {
  Rational p;  // in (0, 1)
  bool operator==(const ShiftedGeometric&) const = default;
};

struct DiscreteUniform {
  std::int64_t a = 1;
  std::int64_t b = 1;  // 1 <= a <= b
  bool operator==(const DiscreteUniform&) const = default;
};

using DistributionSpec = std::variant<ShiftedGeometric, DiscreteUniform>;

/// Throws DomainError when parameters are out of range.
void validate(const DistributionSpec& d);

/// Parses `geom:p=<rational>` or `uniform:a=<int>,b=<int>`.
DistributionSpec parse_distribution(const std::string& text);
std::string to_string(const DistributionSpec& d);

/// Parses "3/4", "0.05", "1e-3" or "7" into an exact rational.
Rational parse_rational(const std::string& text);

/// Decimal rendering of an exact rational with `digits` digits after the
/// point, rounded half away from zero.
std::string to_decimal(const Rational& q, int digits);

enum class Method { kRatio, kTaylor };

struct MethodEstimate {
  Method method = Method::kRatio;
  int order = 0;  // Taylor order; 0 for the ratio estimator
  double var_steps = 0;
  double sd_steps = 0;
  std::optional<double> var_time;
  std::optional<double> sd_time;
  bool operator==(const MethodEstimate&) const = default;
};

struct EstimateReport {
  std::size_t n = 0;
  std::optional<double> dt;
  double mrt_steps = 0;
  std::optional<double> mrt_time;
  std::vector<MethodEstimate> mrt_variance;
  double mean_residence_steps = 0;
  std::optional<double> mean_residence_time;
  std::optional<double> mean_residence_var_steps;
  std::optional<double> mean_residence_sd_steps;
  std::optional<double> mean_residence_var_time;
  std::optional<double> mean_residence_sd_time;
  bool operator==(const EstimateReport&) const = default;
};

std::string method_label(Method m, int order);

}  // namespace mrt
