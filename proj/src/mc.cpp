#include "mrt/mc.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <thread>

#include "mrt/estimators.hpp"
#include "mrt/moments.hpp"
#include "mrt/taylor.hpp"

namespace mrt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_open_closed(std::mt19937_64& rng) {
  // (k + 1) / 2^53 for k uniform in [0, 2^53): never zero
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

struct ReplicateResult {
  double f = 0;
  std::vector<double> estimates;
};

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(~stream)));
}

void draw(const DistributionSpec& d, std::size_t n, std::mt19937_64& rng,
          std::vector<std::int64_t>& out) {
  out.resize(n);
  if (const auto* g = std::get_if<ShiftedGeometric>(&d)) {
    const double log_q = std::log1p(-g->p.get_d());
    for (auto& x : out) {
      x = 1 + static_cast<std::int64_t>(std::floor(std::log(unit_open_closed(rng)) / log_q));
    }
    return;
  }
  const auto& u = std::get<DiscreteUniform>(d);
  std::uniform_int_distribution<std::int64_t> dist(u.a, u.b);
  for (auto& x : out) x = dist(rng);
}

ResidenceSample sample(const DistributionSpec& d, std::size_t n, std::mt19937_64& rng) {
  validate(d);
  if (n < 1) throw DomainError("sample size must be >= 1");
  std::vector<std::int64_t> steps;
  draw(d, n, rng, steps);
  return ResidenceSample(std::move(steps));
}

void validate(const ExperimentConfig& cfg) {
  validate(cfg.dist);
  if (cfg.replicates < 2) throw DomainError("replicates must be >= 2");
  if (cfg.sizes.empty()) throw DomainError("at least one sample size is required");
  for (long n : cfg.sizes) {
    if (n < 1) throw DomainError("sample sizes must be >= 1");
  }
  for (int m : cfg.taylor_orders) {
    if (m < 1 || m > 8) throw DomainError("Taylor orders must lie in 1..8");
  }
}

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  int max_order = 2;
  for (int m : cfg.taylor_orders) max_order = std::max(max_order, 2 * m);
  const auto exact = exact_moments(cfg.dist, max_order);

  std::vector<ExperimentRow> rows;
  for (std::size_t size_index = 0; size_index < cfg.sizes.size(); ++size_index) {
    const long n = cfg.sizes[size_index];
    ExperimentRow row;
    row.n = n;

    std::vector<CompiledExpression> compiled;
    for (int m : cfg.taylor_orders) compiled.emplace_back(cached_expression(m), n);

    std::vector<EstimatorSummary> summaries;
    if (cfg.ratio) {
      summaries.push_back({"ratio", 0, 0, var_mrt_ratio(exact, n).get_d()});
    }
    for (int m : cfg.taylor_orders) {
      summaries.push_back({method_label(Method::kTaylor, m), 0, 0,
                           evaluate_expression(cached_expression(m), exact, n).get_d()});
    }

    std::vector<ReplicateResult> results(cfg.replicates);
    auto work = [&](std::size_t begin, std::size_t end) {
      std::vector<std::int64_t> steps;
      for (std::size_t r = begin; r < end; ++r) {
        auto rng = make_stream(cfg.seed, (static_cast<std::uint64_t>(size_index) << 40) | r);
        draw(cfg.dist, static_cast<std::size_t>(n), rng, steps);
        auto& res = results[r];
        res.f = mean_residual_steps(steps);
        if (cfg.ratio) res.estimates.push_back(var_mrt_ratio(steps));
        if (!compiled.empty()) {
          double mean = 0;
          const auto central = sample_central_moments(steps, max_order, mean);
          for (const auto& expr : compiled) res.estimates.push_back(expr(mean, central));
        }
      }
    };
    const unsigned threads = std::max(1u, cfg.threads);
    if (threads == 1) {
      work(0, cfg.replicates);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (cfg.replicates + threads - 1) / threads;
      for (unsigned w = 0; w < threads; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(cfg.replicates, begin + chunk);
        if (begin < end) pool.emplace_back(work, begin, end);
      }
    }

    // Aggregation runs in replicate order, independent of the thread count.
    const double reps = static_cast<double>(cfg.replicates);
    long double sum_f = 0;
    for (const auto& res : results) sum_f += res.f;
    const double mean_f = static_cast<double>(sum_f / reps);
    long double m2 = 0;
    long double m4 = 0;
    for (const auto& res : results) {
      const long double d = res.f - mean_f;
      m2 += d * d;
      m4 += d * d * d * d;
    }
    const double var = static_cast<double>(m2 / (reps - 1));
    const double fourth = static_cast<double>(m4 / reps);
    row.mean_mrt = mean_f;
    row.reference_var = var;
    const double var_of_var = (fourth - var * var * (reps - 3) / (reps - 1)) / reps;
    row.reference_var_se = std::sqrt(std::max(0.0, var_of_var));

    for (std::size_t e = 0; e < summaries.size(); ++e) {
      long double sum = 0;
      for (const auto& res : results) sum += res.estimates[e];
      const double mean = static_cast<double>(sum / reps);
      long double ss = 0;
      for (const auto& res : results) {
        const long double d = res.estimates[e] - mean;
        ss += d * d;
      }
      summaries[e].mean = mean;
      summaries[e].se = std::sqrt(static_cast<double>(ss / (reps - 1)) / reps);
    }
    row.estimators = std::move(summaries);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_experiment_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << "N,mean_mrt,reference_var,reference_var_se";
  if (!rows.empty()) {
    for (const auto& e : rows.front().estimators) {
      out << ",est_" << e.label << "_mean,est_" << e.label << "_se,exact_moments_"
          << e.label;
    }
  }
  out << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& row : rows) {
    out << row.n << ',' << row.mean_mrt << ',' << row.reference_var << ','
        << row.reference_var_se;
    for (const auto& e : row.estimators) {
      out << ',' << e.mean << ',' << e.se << ',' << e.exact_moments_value;
    }
    out << '\n';
  }
  out.precision(old_precision);
}

Rational exact_variance_small(const DistributionSpec& d, long n, std::size_t max_states) {
  validate(d);
  const auto* u = std::get_if<DiscreteUniform>(&d);
  if (u == nullptr) {
    throw DomainError("exact variance needs a finite-support distribution");
  }
  if (n < 1) throw DomainError("sample size must be >= 1");

  // (S, R) is a function of the multiset of draws, so the final state count is
  // at most C(n + w - 1, w - 1); also at most (#S values) * (#R values).
  {
    const long w = static_cast<long>(u->b - u->a + 1);
    BigInt multisets;
    mpz_bin_uiui(multisets.get_mpz_t(), static_cast<unsigned long>(n + w - 1),
                 static_cast<unsigned long>(w - 1));
    const BigInt s_range = BigInt(n) * (w - 1) + 1;
    const BigInt r_range = BigInt(n) * (BigInt(u->b) * u->b - BigInt(u->a) * u->a) + 1;
    BigInt bound = s_range * r_range;
    if (multisets < bound) bound = multisets;
    if (bound > BigInt(static_cast<unsigned long>(max_states))) {
      throw DomainError("exact variance state space exceeds the configured limit");
    }
  }

  // (sum x, sum x^2) -> number of ordered tuples reaching it
  using State = std::pair<std::int64_t, std::int64_t>;
  std::map<State, BigInt> states{{{0, 0}, BigInt(1)}};
  for (long step = 0; step < n; ++step) {
    std::map<State, BigInt> next;
    for (const auto& [state, count] : states) {
      for (std::int64_t x = u->a; x <= u->b; ++x) {
        next[{state.first + x, state.second + x * x}] += count;
      }
      if (next.size() > max_states) {
        throw DomainError("exact variance state space exceeds the configured limit");
      }
    }
    states = std::move(next);
  }

  // Group by S so each S contributes  sum c R / S  and  sum c R^2 / S^2.
  std::map<std::int64_t, std::pair<BigInt, BigInt>> by_sum;
  BigInt total = 0;
  for (const auto& [state, count] : states) {
    auto& acc = by_sum[state.first];
    const BigInt r(static_cast<long>(state.second));
    acc.first += count * r;
    acc.second += count * r * r;
    total += count;
  }
  Rational e_ratio(0);
  Rational e_ratio_sq(0);
  for (const auto& [s, acc] : by_sum) {
    const BigInt bs(static_cast<long>(s));
    e_ratio += make_rational(acc.first, bs);
    e_ratio_sq += make_rational(acc.second, bs * bs);
  }
  e_ratio /= total;
  e_ratio_sq /= total;
  // Var(1/2 + R/(2S)) = Var(R/S) / 4
  Rational var = (e_ratio_sq - e_ratio * e_ratio) / 4;
  var.canonicalize();
  return var;
}

}  // namespace mrt
