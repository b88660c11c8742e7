#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mrt/core.hpp"

namespace mrt {

/// Plug-in (1/N) sample moments: mean, raw m'_1..m'_4 and central
/// mu_2..mu_max_central_order. Requires max_central_order >= 2.
FloatMoments sample_moments(const ResidenceSample& s, int max_central_order);

/// Plug-in central moments indexed by order 0..max_order (mu_0 = 1,
/// mu_1 = 0); `mean` receives the sample mean.
std::vector<double> sample_central_moments(std::span<const std::int64_t> steps,
                                           int max_order, double& mean);

/// Same estimators in exact rational arithmetic.
ExactMoments sample_moments_exact(const ResidenceSample& s, int max_central_order);

/// Exact raw moments E[X^n], n = 0..max_order, of a reference distribution.
std::vector<Rational> exact_raw_moments(const DistributionSpec& d, int max_order);

/// Exact moments of a reference distribution; max_central_order <= 16.
ExactMoments exact_moments(const DistributionSpec& d, int max_central_order);

/// Eulerian polynomial A_n(t) coefficients: A(n, m) for m = 0..n-1 (A_0 = 1).
std::vector<BigInt> eulerian_row(int n);

/// Binomial transforms between raw (about zero) and central moments.
/// Both vectors are indexed by order and start at order 0.
std::vector<Rational> raw_to_central(const std::vector<Rational>& raw);
std::vector<Rational> central_to_raw(const std::vector<Rational>& central,
                                     const Rational& mean);

}  // namespace mrt
