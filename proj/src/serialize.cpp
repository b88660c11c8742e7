#include "mrt/serialize.hpp"

namespace nlohmann {

void adl_serializer<mpq_class>::from_json(const json& j, mpq_class& q) {
  if (j.is_string()) {
    q = mrt::parse_rational(j.get<std::string>());
  } else if (j.is_number_integer()) {
    q = mpq_class(j.get<long>());
  } else {
    throw mrt::ParseError("expected a rational as \"p/q\" string or integer");
  }
}

}  // namespace nlohmann

namespace mrt {

namespace {

template <class T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <class T>
void get_optional(const json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j.at(key).is_null()) {
    v = j.at(key).get<T>();
  } else {
    v.reset();
  }
}

template <class Scalar>
void moments_to_json(json& j, const MomentVector<Scalar>& m) {
  j = json{{"exact", MomentVector<Scalar>::exact}, {"mean", m.mean}};
  json central = json::object();
  for (const auto& [k, v] : m.central) central[std::to_string(k)] = v;
  json raw = json::object();
  for (const auto& [k, v] : m.raw) raw[std::to_string(k)] = v;
  j["central"] = central;
  j["raw"] = raw;
}

template <class Scalar>
void moments_from_json(const json& j, MomentVector<Scalar>& m) {
  m = {};
  m.mean = j.at("mean").get<Scalar>();
  for (const auto& [k, v] : j.at("central").items()) m.central[std::stoi(k)] = v.template get<Scalar>();
  for (const auto& [k, v] : j.at("raw").items()) m.raw[std::stoi(k)] = v.template get<Scalar>();
}

}  // namespace

void to_json(json& j, const ResidenceSample& s) {
  j = json{{"steps", s.steps()}, {"n", s.size()}};
  put_optional(j, "dt", s.dt());
}

void from_json(const json& j, ResidenceSample& s) {
  std::optional<double> dt;
  get_optional(j, "dt", dt);
  s = ResidenceSample(j.at("steps").get<std::vector<std::int64_t>>(), dt);
  if (j.contains("n") && j.at("n").get<std::size_t>() != s.size()) {
    throw ParseError("residence sample field n does not match the step count");
  }
}

void to_json(json& j, const OccupancyTrace& t) { j = json{{"bits", t.bits}}; }

void from_json(const json& j, OccupancyTrace& t) {
  t.bits = j.at("bits").get<std::vector<std::uint8_t>>();
  for (auto b : t.bits) {
    if (b > 1) throw ParseError("occupancy bits must be 0 or 1");
  }
}

void to_json(json& j, const FloatMoments& m) { moments_to_json(j, m); }
void from_json(const json& j, FloatMoments& m) { moments_from_json(j, m); }
void to_json(json& j, const ExactMoments& m) { moments_to_json(j, m); }
void from_json(const json& j, ExactMoments& m) { moments_from_json(j, m); }

void to_json(json& j, const Term& t) {
  json powers = json::object();
  for (const auto& [m, c] : t.moment_powers) powers[std::to_string(m)] = c;
  j = json{{"coef", t.coef},
           {"n_exponent", t.n_exponent},
           {"mu_exponent", t.mu_exponent},
           {"moment_powers", powers}};
}

void from_json(const json& j, Term& t) {
  t.coef = j.at("coef").get<Rational>();
  t.n_exponent = j.at("n_exponent").get<int>();
  t.mu_exponent = j.at("mu_exponent").get<int>();
  t.moment_powers.clear();
  for (const auto& [m, c] : j.at("moment_powers").items()) {
    t.moment_powers[std::stoi(m)] = c.get<int>();
  }
}

void to_json(json& j, const VarianceExpression& e) {
  j = json{{"order", e.order}, {"terms", e.terms}};
}

void from_json(const json& j, VarianceExpression& e) {
  e.order = j.at("order").get<int>();
  e.terms = j.at("terms").get<std::vector<Term>>();
}

void to_json(json& j, const IndexPattern& p) {
  json slots = json::array();
  for (const auto& s : p.slots()) slots.push_back({s.a, s.b});
  j = json{{"slots", slots}, {"k", p.k()}, {"l", p.l()}};
}

void from_json(const json& j, IndexPattern& p) {
  std::vector<Slot> slots;
  for (const auto& s : j.at("slots")) slots.push_back({s.at(0).get<int>(), s.at(1).get<int>()});
  p = IndexPattern(std::move(slots));
}

void to_json(json& j, const DistributionSpec& d) {
  if (const auto* g = std::get_if<ShiftedGeometric>(&d)) {
    j = json{{"kind", "shifted-geometric"}, {"p", g->p}};
  } else {
    const auto& u = std::get<DiscreteUniform>(d);
    j = json{{"kind", "discrete-uniform"}, {"a", u.a}, {"b", u.b}};
  }
}

void from_json(const json& j, DistributionSpec& d) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "shifted-geometric") {
    d = ShiftedGeometric{j.at("p").get<Rational>()};
  } else if (kind == "discrete-uniform") {
    d = DiscreteUniform{j.at("a").get<std::int64_t>(), j.at("b").get<std::int64_t>()};
  } else {
    throw ParseError("unknown distribution kind '" + kind + "'");
  }
  validate(d);
}

void to_json(json& j, const EstimateReport& r) {
  j = json{{"N", r.n}, {"mrt_steps", r.mrt_steps}, {"mRT_steps", r.mean_residence_steps}};
  put_optional(j, "dt", r.dt);
  put_optional(j, "mrt_time", r.mrt_time);
  put_optional(j, "mRT_time", r.mean_residence_time);
  put_optional(j, "mRT_var_steps", r.mean_residence_var_steps);
  put_optional(j, "mRT_sd_steps", r.mean_residence_sd_steps);
  put_optional(j, "mRT_var_time", r.mean_residence_var_time);
  put_optional(j, "mRT_sd_time", r.mean_residence_sd_time);
  json methods = json::array();
  for (const auto& m : r.mrt_variance) {
    json e{{"method", m.method == Method::kRatio ? "ratio" : "taylor"},
           {"label", method_label(m.method, m.order)},
           {"order", m.order},
           {"mrt_var_steps", m.var_steps},
           {"mrt_sd_steps", m.sd_steps}};
    put_optional(e, "mrt_var_time", m.var_time);
    put_optional(e, "mrt_sd_time", m.sd_time);
    methods.push_back(e);
  }
  j["methods"] = methods;
}

void from_json(const json& j, EstimateReport& r) {
  r = {};
  r.n = j.at("N").get<std::size_t>();
  r.mrt_steps = j.at("mrt_steps").get<double>();
  r.mean_residence_steps = j.at("mRT_steps").get<double>();
  get_optional(j, "dt", r.dt);
  get_optional(j, "mrt_time", r.mrt_time);
  get_optional(j, "mRT_time", r.mean_residence_time);
  get_optional(j, "mRT_var_steps", r.mean_residence_var_steps);
  get_optional(j, "mRT_sd_steps", r.mean_residence_sd_steps);
  get_optional(j, "mRT_var_time", r.mean_residence_var_time);
  get_optional(j, "mRT_sd_time", r.mean_residence_sd_time);
  for (const auto& e : j.at("methods")) {
    MethodEstimate m;
    const auto method = e.at("method").get<std::string>();
    if (method != "ratio" && method != "taylor") {
      throw ParseError("unknown estimator method '" + method + "'");
    }
    m.method = method == "ratio" ? Method::kRatio : Method::kTaylor;
    m.order = e.at("order").get<int>();
    m.var_steps = e.at("mrt_var_steps").get<double>();
    m.sd_steps = e.at("mrt_sd_steps").get<double>();
    get_optional(e, "mrt_var_time", m.var_time);
    get_optional(e, "mrt_sd_time", m.sd_time);
    r.mrt_variance.push_back(m);
  }
}

void to_json(json& j, const FilterConfig& c) { j = json{{"k", c.k}}; }

void from_json(const json& j, FilterConfig& c) {
  c.k = j.at("k").get<int>();
  if (c.k < 1) throw ParseError("filter k must be >= 1");
}

void to_json(json& j, const ExtractionPolicy& p) {
  j = json{{"boundary", p.boundary == BoundaryPolicy::kDropCensored ? "drop-censored"
                                                                     : "include-censored"}};
}

void from_json(const json& j, ExtractionPolicy& p) {
  const auto b = j.at("boundary").get<std::string>();
  if (b == "drop-censored") {
    p.boundary = BoundaryPolicy::kDropCensored;
  } else if (b == "include-censored") {
    p.boundary = BoundaryPolicy::kIncludeCensored;
  } else {
    throw ParseError("unknown boundary policy '" + b + "'");
  }
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{{"dist", c.dist},
           {"sizes", c.sizes},
           {"replicates", c.replicates},
           {"seed", c.seed},
           {"ratio", c.ratio},
           {"taylor_orders", c.taylor_orders}};
}

void from_json(const json& j, ExperimentConfig& c) {
  c = {};
  c.dist = j.at("dist").get<DistributionSpec>();
  c.sizes = j.at("sizes").get<std::vector<long>>();
  c.replicates = j.at("replicates").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.ratio = j.value("ratio", true);
  c.taylor_orders = j.value("taylor_orders", std::vector<int>{8});
  validate(c);
}

}  // namespace mrt
