#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mrt/core.hpp"

namespace mrt {

/// Independent generator for one (seed, stream) pair. Every replicate of an
/// experiment owns its stream, so results do not depend on scheduling.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Draws n values. Shifted geometric uses the inverse CDF
/// 1 + floor(ln U / ln(1 - p)) with U in (0, 1]; uniform uses an unbiased
/// bounded integer draw.
void draw(const DistributionSpec& d, std::size_t n, std::mt19937_64& rng,
          std::vector<std::int64_t>& out);

ResidenceSample sample(const DistributionSpec& d, std::size_t n, std::mt19937_64& rng);

struct ExperimentConfig {
  DistributionSpec dist = ShiftedGeometric{Rational(1, 2)};
  std::vector<long> sizes;
  std::size_t replicates = 100000;
  std::uint64_t seed = 0;
  bool ratio = true;
  std::vector<int> taylor_orders{8};
  unsigned threads = 1;
};

/// Throws DomainError unless replicates >= 2, sizes is nonempty and all
/// sizes are >= 1.
void validate(const ExperimentConfig& cfg);

struct EstimatorSummary {
  std::string label;  // "ratio" or "taylorM"
  double mean = 0;    // mean estimate across replicates
  double se = 0;      // standard error of that mean
  double exact_moments_value = 0;  // estimator evaluated with exact moments
};

struct ExperimentRow {
  long n = 0;
  double mean_mrt = 0;
  double reference_var = 0;     // unbiased variance of f_N across replicates
  double reference_var_se = 0;  // standard error of reference_var
  std::vector<EstimatorSummary> estimators;
};

std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg);

void write_experiment_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);

/// Exact Var(f_N) for a finite-support distribution from the joint law of
/// (sum x, sum x^2), built by N convolution steps in exact arithmetic.
/// Throws DomainError for infinite support or when the state count would
/// exceed max_states.
Rational exact_variance_small(const DistributionSpec& d, long n,
                              std::size_t max_states = 1'000'000);

}  // namespace mrt
