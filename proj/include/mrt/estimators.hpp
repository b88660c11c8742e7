#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrt/core.hpp"

namespace mrt {

/// Mean residual time in steps: 1/2 + sum x^2 / (2 sum x).
double mean_residual_steps(const ResidenceSample& s);
double mean_residual_steps(std::span<const std::int64_t> steps);
Rational mean_residual_steps_exact(const ResidenceSample& s);

/// Mean residence time in steps.
double mean_residence_steps(const ResidenceSample& s);

/// Variance of the mean residence time: unbiased sample variance / N.
/// Needs N >= 2.
double var_mean_residence(const ResidenceSample& s);

/// Ratio (delta-method) variance of the mrT statistic from raw moments:
///   (m4 - 2 m2 m3 / m1 + m2^3 / m1^2) / (4 N m1^2).
template <class Scalar>
Scalar var_mrt_ratio(const MomentVector<Scalar>& mom, long n) {
  if (n < 1) throw DomainError("sample size must be >= 1");
  const Scalar m1 = mom.raw_moment(1);
  const Scalar m2 = mom.raw_moment(2);
  const Scalar m3 = mom.raw_moment(3);
  const Scalar m4 = mom.raw_moment(4);
  const Scalar bracket = m4 - 2 * m2 * m3 / m1 + m2 * m2 * m2 / (m1 * m1);
  return Scalar(bracket / (4 * Scalar(n) * m1 * m1));
}

/// Same estimator on a sample. The bracket is evaluated as the mean of
/// (x^2 - r x)^2 with r = m2/m1, an algebraically identical form that is
/// free of cancellation and never negative.
double var_mrt_ratio(const ResidenceSample& s);
double var_mrt_ratio(std::span<const std::int64_t> steps);

/// Order-M Taylor-expansion estimator with plug-in central moments.
double var_mrt_taylor(const ResidenceSample& s, int order);

/// |f_N - ((mean^2 + v) / (2 mean) + 1/2)| with v the 1/N variance.
/// Returns the relative residual in float mode.
double inspection_identity_check(const ResidenceSample& s);
Rational inspection_identity_check_exact(const ResidenceSample& s);

struct AutocorrelationRow {
  int lag = 0;
  double mean_r = 0;
  double sd_r = 0;
};

struct AutocorrelationResult {
  std::vector<AutocorrelationRow> rows;
  std::size_t used_traces = 0;
  std::size_t short_traces = 0;     // fewer than max_lag + 2 residences
  std::size_t constant_traces = 0;  // zero variance, excluded
};

/// Normalized autocorrelation of the temporally ordered residences of each
/// trace, averaged across traces for lags 0..max_lag.
/// Throws DomainError when no trace contributes.
AutocorrelationResult rt_autocorrelation(
    const std::vector<std::vector<std::int64_t>>& per_trace_rts, int max_lag);

struct ReportOptions {
  bool ratio = true;
  bool taylor = true;
  int order = 8;
};

/// Point estimates and their uncertainties, in steps and (when the sample
/// has a time step) in time units.
EstimateReport build_report(const ResidenceSample& s, const ReportOptions& opts);

}  // namespace mrt
