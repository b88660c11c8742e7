#pragma once

#include <istream>
#include <optional>
#include <vector>

#include "mrt/core.hpp"

namespace mrt {

/// Transient-escape tolerance: absences of up to k-1 consecutive steps
/// between two stays are bridged.
struct FilterConfig {
  int k = 1;

  /// k = round(t_star / dt). Throws DomainError unless the result is >= 1.
  static FilterConfig from_times(double t_star, double dt);
  bool operator==(const FilterConfig&) const = default;
};

enum class BoundaryPolicy {
  kDropCensored,     // runs touching either end of the trace are discarded
  kIncludeCensored,
};

struct ExtractionPolicy {
  BoundaryPolicy boundary = BoundaryPolicy::kDropCensored;
  bool operator==(const ExtractionPolicy&) const = default;
};

/// One trace per nonempty line, whitespace-separated 0/1 tokens.
/// Throws ParseError naming line and column of the first bad token.
std::vector<OccupancyTrace> parse_traces(std::istream& in);

/// Fills every interior 0-run shorter than k (bounded by 1s on both sides).
/// Boundary 0-runs and longer gaps are left untouched; k = 1 is the identity.
OccupancyTrace filter_transient_escapes(const OccupancyTrace& x,
                                        const FilterConfig& cfg);

/// The filter as a dilate/erode pair of full convolutions with a ones
/// window of length k, clamped and thresholded, then trimmed by k-1 on the
/// leading side. Kept as the reference construction for the gap-fill rule.
OccupancyTrace filter_by_convolution(const OccupancyTrace& x,
                                     const FilterConfig& cfg);

/// Lengths of maximal 1-runs in temporal order.
std::vector<std::int64_t> extract_residences(const OccupancyTrace& x,
                                             const ExtractionPolicy& policy);

/// Per-trace residences (after filtering), in trace order. Traces with no
/// residences contribute an empty list.
std::vector<std::vector<std::int64_t>> residences_per_trace(
    const std::vector<OccupancyTrace>& traces, const FilterConfig& cfg,
    const ExtractionPolicy& policy, unsigned threads = 1);

/// Filter then extract every trace and pool the residences.
/// Throws EmptySampleError when no residence is found.
ResidenceSample collect_sample(const std::vector<OccupancyTrace>& traces,
                               const FilterConfig& cfg,
                               const ExtractionPolicy& policy,
                               std::optional<double> dt = std::nullopt,
                               unsigned threads = 1);

/// CSV with header `steps`, one count per line.
void write_steps_csv(std::ostream& out, const std::vector<std::int64_t>& steps);

/// Reads the CSV written by write_steps_csv; the header line is optional.
std::vector<std::int64_t> read_steps_csv(std::istream& in);

}  // namespace mrt
