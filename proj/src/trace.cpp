#include "mrt/trace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <string>
#include <thread>

namespace mrt {

FilterConfig FilterConfig::from_times(double t_star, double dt) {
  if (!(dt > 0) || !(t_star > 0)) {
    throw DomainError("t* and dt must be positive");
  }
  const double k = std::round(t_star / dt);
  if (k < 1 || k > 1e9) throw DomainError("t*/dt must round to k >= 1");
  return FilterConfig{static_cast<int>(k)};
}

std::vector<OccupancyTrace> parse_traces(std::istream& in) {
  std::vector<OccupancyTrace> traces;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    OccupancyTrace trace;
    std::size_t i = 0;
    while (i < line.size()) {
      if (std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
        continue;
      }
      std::size_t end = i;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) {
        ++end;
      }
      const std::string token = line.substr(i, end - i);
      if (token != "0" && token != "1") {
        throw ParseError("invalid token '" + token + "' at line " +
                         std::to_string(line_no) + ", column " +
                         std::to_string(i + 1));
      }
      trace.bits.push_back(token == "1" ? 1 : 0);
      i = end;
    }
    if (!trace.bits.empty()) traces.push_back(std::move(trace));
  }
  return traces;
}

OccupancyTrace filter_transient_escapes(const OccupancyTrace& x,
                                        const FilterConfig& cfg) {
  if (cfg.k < 1) throw DomainError("filter window k must be >= 1");
  OccupancyTrace out = x;
  auto& bits = out.bits;
  const std::size_t n = bits.size();
  const auto max_gap = static_cast<std::size_t>(cfg.k - 1);

  std::size_t i = 0;
  while (i < n && bits[i] == 0) ++i;  // leading gap is never filled
  while (i < n) {
    while (i < n && bits[i] == 1) ++i;
    const std::size_t gap_start = i;
    while (i < n && bits[i] == 0) ++i;
    if (i == n) break;  // trailing gap
    if (i - gap_start <= max_gap) {
      std::fill(bits.begin() + static_cast<std::ptrdiff_t>(gap_start),
                bits.begin() + static_cast<std::ptrdiff_t>(i), 1);
    }
  }
  return out;
}

namespace {

std::vector<int> full_convolve_ones(const std::vector<int>& x, int k) {
  if (x.empty()) return {};
  std::vector<int> out(x.size() + static_cast<std::size_t>(k) - 1, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int j = 0; j < k; ++j) out[i + static_cast<std::size_t>(j)] += x[i];
  }
  return out;
}

}  // namespace

OccupancyTrace filter_by_convolution(const OccupancyTrace& x,
                                     const FilterConfig& cfg) {
  if (cfg.k < 1) throw DomainError("filter window k must be >= 1");
  const int k = cfg.k;
  std::vector<int> v(x.bits.begin(), x.bits.end());

  auto dilated = full_convolve_ones(v, k);
  for (auto& d : dilated) d = d > 1 ? 1 : d;
  auto eroded = full_convolve_ones(dilated, k);

  OccupancyTrace out;
  out.bits.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out.bits[i] = eroded[i + static_cast<std::size_t>(k) - 1] < k ? 0 : 1;
  }
  return out;
}

std::vector<std::int64_t> extract_residences(const OccupancyTrace& x,
                                             const ExtractionPolicy& policy) {
  std::vector<std::int64_t> runs;
  const auto& bits = x.bits;
  const std::size_t n = bits.size();
  std::size_t i = 0;
  while (i < n) {
    if (bits[i] == 0) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < n && bits[i] == 1) ++i;
    const bool censored = start == 0 || i == n;
    if (!censored || policy.boundary == BoundaryPolicy::kIncludeCensored) {
      runs.push_back(static_cast<std::int64_t>(i - start));
    }
  }
  return runs;
}

std::vector<std::vector<std::int64_t>> residences_per_trace(
    const std::vector<OccupancyTrace>& traces, const FilterConfig& cfg,
    const ExtractionPolicy& policy, unsigned threads) {
  std::vector<std::vector<std::int64_t>> out(traces.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      out[t] = extract_residences(filter_transient_escapes(traces[t], cfg), policy);
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(traces.size())));
  if (threads <= 1) {
    work(0, traces.size());
    return out;
  }
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (traces.size() + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(traces.size(), begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
  }
  return out;
}

ResidenceSample collect_sample(const std::vector<OccupancyTrace>& traces,
                               const FilterConfig& cfg,
                               const ExtractionPolicy& policy,
                               std::optional<double> dt, unsigned threads) {
  std::vector<std::int64_t> steps;
  for (auto& rts : residences_per_trace(traces, cfg, policy, threads)) {
    steps.insert(steps.end(), rts.begin(), rts.end());
  }
  if (steps.empty()) {
    throw EmptySampleError("no residences found in the input traces");
  }
  return ResidenceSample(std::move(steps), dt);
}

void write_steps_csv(std::ostream& out, const std::vector<std::int64_t>& steps) {
  out << "steps\n";
  for (auto s : steps) out << s << '\n';
}

std::vector<std::int64_t> read_steps_csv(std::istream& in) {
  std::vector<std::int64_t> steps;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string field = line.substr(first, last - first + 1);
    if (line_no == 1 && field == "steps") continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(field, &used);
      if (used != field.size()) throw std::invalid_argument(field);
      steps.push_back(v);
    } catch (const std::exception&) {
      throw ParseError("invalid residence count '" + field + "' at line " +
                       std::to_string(line_no));
    }
  }
  return steps;
}

}  // namespace mrt
