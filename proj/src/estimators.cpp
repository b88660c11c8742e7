#include "mrt/estimators.hpp"

#include <cmath>

#include "mrt/moments.hpp"
#include "mrt/taylor.hpp"

namespace mrt {

namespace {

struct PowerSums {
  unsigned __int128 s = 0;  // sum x
  unsigned __int128 r = 0;  // sum x^2
};

PowerSums power_sums(std::span<const std::int64_t> steps) {
  if (steps.empty()) throw EmptySampleError("empty residence sample");
  PowerSums p;
  for (auto x : steps) {
    const auto ux = static_cast<unsigned __int128>(x);
    p.s += ux;
    p.r += ux * ux;
  }
  return p;
}

BigInt to_big(unsigned __int128 v) {
  const auto hi = static_cast<unsigned long>(v >> 64);
  const auto lo = static_cast<unsigned long>(v);
  BigInt out(hi);
  out <<= 64;
  out += lo;
  return out;
}

}  // namespace

double mean_residual_steps(const ResidenceSample& s) {
  return mean_residual_steps(s.steps());
}

double mean_residual_steps(std::span<const std::int64_t> steps) {
  const auto p = power_sums(steps);
  return 0.5 + static_cast<double>(p.r) / (2.0 * static_cast<double>(p.s));
}

Rational mean_residual_steps_exact(const ResidenceSample& s) {
  const auto p = power_sums(s.steps());
  Rational f(to_big(p.r), 2 * to_big(p.s));
  f.canonicalize();
  return f + Rational(1, 2);
}

double mean_residence_steps(const ResidenceSample& s) {
  const auto p = power_sums(s.steps());
  return static_cast<double>(p.s) / static_cast<double>(s.size());
}

double var_mean_residence(const ResidenceSample& s) {
  if (s.size() < 2) throw DomainError("variance of the mean needs N >= 2");
  const double mean = mean_residence_steps(s);
  double ss = 0;
  for (auto x : s.steps()) {
    const double d = static_cast<double>(x) - mean;
    ss += d * d;
  }
  const double n = static_cast<double>(s.size());
  return ss / (n - 1) / n;
}

double var_mrt_ratio(const ResidenceSample& s) { return var_mrt_ratio(s.steps()); }

double var_mrt_ratio(std::span<const std::int64_t> steps) {
  const auto p = power_sums(steps);
  const double n = static_cast<double>(steps.size());
  const double m1 = static_cast<double>(p.s) / n;
  const double ratio = static_cast<double>(p.r) / static_cast<double>(p.s);
  double bracket = 0;
  for (auto xi : steps) {
    const double x = static_cast<double>(xi);
    const double d = x * (x - ratio);
    bracket += d * d;
  }
  bracket /= n;
  return bracket / (4.0 * n * m1 * m1);
}

double var_mrt_taylor(const ResidenceSample& s, int order) {
  if (order < 1) throw DomainError("Taylor order must be >= 1");
  const auto mom = sample_moments(s, 2 * order);
  return evaluate_expression(cached_expression(order), mom,
                             static_cast<long>(s.size()));
}

double inspection_identity_check(const ResidenceSample& s) {
  const double f = mean_residual_steps(s);
  const auto mom = sample_moments(s, 2);
  const double mean = mom.mean;
  const double via_identity = (mean * mean + mom.central.at(2)) / (2 * mean) + 0.5;
  return std::abs(f - via_identity) / f;
}

Rational inspection_identity_check_exact(const ResidenceSample& s) {
  const Rational f = mean_residual_steps_exact(s);
  const auto mom = sample_moments_exact(s, 2);
  const Rational via_identity =
      (mom.mean * mom.mean + mom.central.at(2)) / (2 * mom.mean) + Rational(1, 2);
  return abs(f - via_identity);
}

AutocorrelationResult rt_autocorrelation(
    const std::vector<std::vector<std::int64_t>>& per_trace_rts, int max_lag) {
  if (max_lag < 0) throw DomainError("max lag must be >= 0");
  AutocorrelationResult result;
  const auto lags = static_cast<std::size_t>(max_lag) + 1;
  std::vector<std::vector<double>> per_lag(lags);

  for (const auto& rts : per_trace_rts) {
    if (rts.size() < static_cast<std::size_t>(max_lag) + 2) {
      ++result.short_traces;
      continue;
    }
    const double n = static_cast<double>(rts.size());
    double mean = 0;
    for (auto x : rts) mean += static_cast<double>(x);
    mean /= n;
    double denom = 0;
    for (auto x : rts) denom += (static_cast<double>(x) - mean) * (static_cast<double>(x) - mean);
    if (denom == 0) {
      ++result.constant_traces;
      continue;
    }
    ++result.used_traces;
    for (std::size_t h = 0; h < lags; ++h) {
      double num = 0;
      for (std::size_t t = 0; t + h < rts.size(); ++t) {
        num += (static_cast<double>(rts[t]) - mean) * (static_cast<double>(rts[t + h]) - mean);
      }
      per_lag[h].push_back(num / denom);
    }
  }
  if (result.used_traces == 0) {
    throw DomainError("no trace has enough non-constant residences for the autocorrelation");
  }

  for (std::size_t h = 0; h < lags; ++h) {
    const auto& values = per_lag[h];
    const double n = static_cast<double>(values.size());
    double mean = 0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    result.rows.push_back({static_cast<int>(h), mean, sd});
  }
  return result;
}

EstimateReport build_report(const ResidenceSample& s, const ReportOptions& opts) {
  if (s.size() == 0) throw EmptySampleError("empty residence sample");
  EstimateReport r;
  r.n = s.size();
  r.dt = s.dt();
  r.mrt_steps = mean_residual_steps(s);
  r.mean_residence_steps = mean_residence_steps(s);

  auto add = [&](Method m, int order, double var) {
    MethodEstimate e;
    e.method = m;
    e.order = order;
    e.var_steps = var;
    e.sd_steps = std::sqrt(var);
    if (r.dt) {
      e.var_time = var * *r.dt * *r.dt;
      e.sd_time = std::sqrt(*e.var_time);
    }
    r.mrt_variance.push_back(e);
  };
  if (opts.ratio) add(Method::kRatio, 0, var_mrt_ratio(s));
  if (opts.taylor) add(Method::kTaylor, opts.order, var_mrt_taylor(s, opts.order));

  if (s.size() >= 2) {
    r.mean_residence_var_steps = var_mean_residence(s);
    r.mean_residence_sd_steps = std::sqrt(*r.mean_residence_var_steps);
  }
  if (r.dt) {
    const double dt = *r.dt;
    r.mrt_time = r.mrt_steps * dt;
    r.mean_residence_time = r.mean_residence_steps * dt;
    if (r.mean_residence_var_steps) {
      r.mean_residence_var_time = *r.mean_residence_var_steps * dt * dt;
      r.mean_residence_sd_time = std::sqrt(*r.mean_residence_var_time);
    }
  }
  return r;
}

}  // namespace mrt
