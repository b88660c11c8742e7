#include "mrt/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "mrt/core.hpp"
#include "mrt/estimators.hpp"
#include "mrt/mc.hpp"
#include "mrt/moments.hpp"
#include "mrt/serialize.hpp"
#include "mrt/taylor.hpp"
#include "mrt/trace.hpp"

namespace mrt {

namespace {

struct FilterArgs {
  std::optional<int> k;
  std::optional<double> t_star;
  std::optional<double> dt;
  std::string boundary = "drop";

  FilterConfig filter() const {
    if (k) {
      if (*k < 1) throw ParseError("--k must be >= 1");
      return FilterConfig{*k};
    }
    if (t_star) {
      if (!dt) throw ParseError("--tstar needs --dt");
      return FilterConfig::from_times(*t_star, *dt);
    }
    return FilterConfig{1};
  }

  ExtractionPolicy policy() const {
    return ExtractionPolicy{boundary == "include" ? BoundaryPolicy::kIncludeCensored
                                                  : BoundaryPolicy::kDropCensored};
  }
};

void add_filter_options(CLI::App* cmd, FilterArgs& f) {
  cmd->add_option("--k", f.k, "bridge absences shorter than k steps");
  cmd->add_option("--tstar", f.t_star, "absence time that ends a residence (k = round(tstar/dt))");
  cmd->add_option("--dt", f.dt, "time step between frames");
  cmd->add_option("--boundary", f.boundary, "runs touching the trace ends")
      ->check(CLI::IsMember({"drop", "include"}));
}

std::vector<OccupancyTrace> read_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace file '" + path + "'");
  return parse_traces(in);
}

// Writes to --out when given, otherwise to `out`.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ParseError("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::vector<long> parse_sizes(const std::string& text) {
  std::vector<long> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      sizes.push_back(v);
    } catch (const std::exception&) {
      throw ParseError("invalid sample size '" + item + "'");
    }
  }
  if (sizes.empty()) throw ParseError("at least one sample size is required");
  return sizes;
}

}  // namespace

std::vector<int> parse_order_list(const std::string& text) {
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError("invalid order list '" + text + "'");
    }
  };
  std::set<int> orders;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots));
    const int hi = to_int(text.substr(dots + 2));
    for (int m = lo; m <= hi; ++m) orders.insert(m);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) orders.insert(to_int(item));
  }
  if (orders.empty() || *orders.begin() < 1 || *orders.rbegin() > 8) {
    throw ParseError("orders must lie in 1..8");
  }
  return {orders.begin(), orders.end()};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean residual time estimation with variance estimates", "mrt"};
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 1024u));
  std::string out_path;

  // extract
  auto* extract = app.add_subcommand("extract", "occupancy traces -> residence step counts (CSV)");
  std::string input;
  FilterArgs filter_args;
  extract->add_option("--input", input, "trace file, one 0/1 trace per line")->required();
  add_filter_options(extract, filter_args);
  extract->add_option("--out", out_path, "output file (default stdout)");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "residence counts -> mrT report (JSON)");
  std::string rts_path;
  std::optional<double> dt;
  int order = 8;
  std::string method = "both";
  estimate->add_option("--rts", rts_path, "CSV of residence step counts")->required();
  estimate->add_option("--dt", dt, "time step, enables time-unit fields");
  estimate->add_option("--order", order, "Taylor expansion order")->check(CLI::Range(1, 8));
  estimate->add_option("--method", method, "variance estimator")
      ->check(CLI::IsMember({"ratio", "taylor", "both"}));
  estimate->add_option("--out", out_path, "output file (default stdout)");

  // gen-expr
  auto* gen = app.add_subcommand("gen-expr", "print the order-M variance expansion");
  std::string format = "text";
  bool printed_coefficients = false;
  gen->add_option("--order", order, "expansion order")->required()->check(CLI::Range(1, 12));
  gen->add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}));
  gen->add_flag("--printed-coefficients", printed_coefficients,
                "use the derivative bracket without the factor N (comparison only)");
  gen->add_option("--out", out_path, "output file (default stdout)");

  // exact
  auto* exact = app.add_subcommand("exact", "estimators evaluated with exact moments");
  std::string dist_text;
  long n = 0;
  std::string orders_text = "1..8";
  int digits = 20;
  exact->add_option("--dist", dist_text, "geom:p=<rational> or uniform:a=<int>,b=<int>")->required();
  exact->add_option("--n", n, "sample size")->required()->check(CLI::PositiveNumber);
  exact->add_option("--orders", orders_text, "Taylor orders, e.g. 1..8 or 1,3,8");
  exact->add_option("--digits", digits, "digits after the decimal point")->check(CLI::Range(1, 200));
  exact->add_option("--out", out_path, "output file (default stdout)");

  // mc
  auto* mc = app.add_subcommand("mc", "Monte Carlo check of the estimators (CSV)");
  std::string sizes_text;
  std::size_t reps = 100000;
  std::uint64_t seed = 0;
  std::string mc_orders = "8";
  bool no_ratio = false;
  mc->add_option("--dist", dist_text, "geom:p=<rational> or uniform:a=<int>,b=<int>")->required();
  mc->add_option("--n", sizes_text, "comma-separated sample sizes")->required();
  mc->add_option("--reps", reps, "replicates per sample size")->check(CLI::Range(2ul, 100000000ul));
  mc->add_option("--seed", seed, "64-bit seed");
  mc->add_option("--orders", mc_orders, "Taylor orders to evaluate");
  mc->add_flag("--no-ratio", no_ratio, "skip the ratio estimator");
  mc->add_option("--out", out_path, "output file (default stdout)");

  // autocorr
  auto* autocorr = app.add_subcommand("autocorr", "lag autocorrelation of per-trace residences");
  int max_lag = 5;
  autocorr->add_option("--input", input, "trace file, one 0/1 trace per line")->required();
  add_filter_options(autocorr, filter_args);
  autocorr->add_option("--max-lag", max_lag, "largest lag")->check(CLI::NonNegativeNumber);
  autocorr->add_option("--out", out_path, "output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // Help and version requests come through here with exit code 0.
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsageError;
  }

  try {
    if (*extract) {
      const auto traces = read_traces(input);
      std::vector<std::int64_t> steps;
      for (auto& rts : residences_per_trace(traces, filter_args.filter(), filter_args.policy(),
                                            threads)) {
        steps.insert(steps.end(), rts.begin(), rts.end());
      }
      Sink sink(out_path, out);
      write_steps_csv(*sink, steps);
      err << "extracted " << steps.size() << " residences from " << traces.size()
          << " traces\n";
    } else if (*estimate) {
      std::ifstream in(rts_path);
      if (!in) throw ParseError("cannot open residence file '" + rts_path + "'");
      auto steps = read_steps_csv(in);
      for (auto x : steps) {
        if (x < 1) throw ParseError("residence counts must be >= 1");
      }
      if (dt && !(*dt > 0)) throw ParseError("--dt must be positive");
      const ResidenceSample sample(std::move(steps), dt);
      ReportOptions opts;
      opts.ratio = method != "taylor";
      opts.taylor = method != "ratio";
      opts.order = order;
      Sink sink(out_path, out);
      *sink << json(build_report(sample, opts)).dump(2) << '\n';
    } else if (*gen) {
      GenerateOptions opts;
      opts.threads = threads;
      opts.form = printed_coefficients ? CoefficientForm::kPrintedDisplay
                                       : CoefficientForm::kDerived;
      const auto expr = generate_expression(order, opts);
      Sink sink(out_path, out);
      if (format == "json") {
        *sink << json(expr).dump(2) << '\n';
      } else {
        *sink << to_text(expr) << '\n';
      }
    } else if (*exact) {
      const auto dist = parse_distribution(dist_text);
      const auto orders = parse_order_list(orders_text);
      const auto mom = exact_moments(dist, 2 * orders.back());
      Sink sink(out_path, out);
      *sink << "estimator,value\n";
      *sink << "ratio," << to_decimal(var_mrt_ratio(mom, n), digits) << '\n';
      for (int m : orders) {
        *sink << "S" << m << ','
              << to_decimal(evaluate_expression(cached_expression(m), mom, n), digits) << '\n';
      }
      if (std::holds_alternative<DiscreteUniform>(dist)) {
        try {
          const auto var = exact_variance_small(dist, n);
          *sink << "exact," << to_decimal(var, digits) << '\n';
        } catch (const DomainError& e) {
          err << "exact variance skipped: " << e.what() << '\n';
        }
      }
    } else if (*mc) {
      ExperimentConfig cfg;
      cfg.dist = parse_distribution(dist_text);
      cfg.sizes = parse_sizes(sizes_text);
      cfg.replicates = reps;
      cfg.seed = seed;
      cfg.ratio = !no_ratio;
      cfg.taylor_orders = parse_order_list(mc_orders);
      cfg.threads = threads;
      const auto rows = run_experiment(cfg);
      Sink sink(out_path, out);
      write_experiment_csv(*sink, rows);
    } else if (*autocorr) {
      const auto traces = read_traces(input);
      const auto per_trace =
          residences_per_trace(traces, filter_args.filter(), filter_args.policy(), threads);
      const auto result = rt_autocorrelation(per_trace, max_lag);
      Sink sink(out_path, out);
      *sink << "lag,mean_r,sd_r\n" << std::setprecision(17);
      for (const auto& row : result.rows) {
        *sink << row.lag << ',' << row.mean_r << ',' << row.sd_r << '\n';
      }
      err << "autocorrelation over " << result.used_traces << " traces ("
          << result.short_traces << " too short, " << result.constant_traces
          << " constant, excluded)\n";
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsageError;
  }
  return kExitOk;
}

}  // namespace mrt
