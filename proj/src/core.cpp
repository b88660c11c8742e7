#include "mrt/core.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace mrt {

ResidenceSample::ResidenceSample(std::vector<std::int64_t> steps,
                                 std::optional<double> dt)
    : steps_(std::move(steps)), dt_(dt) {
  if (steps_.empty()) throw EmptySampleError("residence sample is empty");
  for (auto x : steps_) {
    if (x < 1) {
      throw DomainError("residence steps must be >= 1, got " +
                        std::to_string(x));
    }
  }
  if (dt_ && !(*dt_ > 0)) throw DomainError("time step must be positive");
}

FloatMoments to_float(const ExactMoments& m) {
  FloatMoments out;
  out.mean = m.mean.get_d();
  for (const auto& [k, v] : m.central) out.central[k] = v.get_d();
  for (const auto& [k, v] : m.raw) out.raw[k] = v.get_d();
  return out;
}

int Term::moment_order() const {
  int total = 0;
  for (const auto& [m, c] : moment_powers) total += m * c;
  return total;
}

bool monomial_less(const Term& a, const Term& b) {
  if (a.n_exponent != b.n_exponent) return a.n_exponent < b.n_exponent;
  if (a.mu_exponent != b.mu_exponent) return a.mu_exponent > b.mu_exponent;
  return a.moment_powers < b.moment_powers;
}

VarianceExpression normalize_expression(VarianceExpression expr) {
  for (auto& t : expr.terms) {
    std::erase_if(t.moment_powers, [](const auto& kv) { return kv.second == 0; });
  }
  std::stable_sort(expr.terms.begin(), expr.terms.end(), monomial_less);

  std::vector<Term> merged;
  merged.reserve(expr.terms.size());
  for (auto& t : expr.terms) {
    if (!merged.empty() && merged.back().same_monomial(t)) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const Term& t) { return sgn(t.coef) == 0; });
  expr.terms = std::move(merged);
  return expr;
}

std::string to_text(const Term& t) {
  std::ostringstream os;
  os << t.coef.get_str() << " * N^-" << t.n_exponent;
  if (t.mu_exponent != 0) os << " * mu^" << t.mu_exponent;
  for (const auto& [m, c] : t.moment_powers) {
    os << " * mu" << m;
    if (c != 1) os << "^" << c;
  }
  return os.str();
}

std::string to_text(const VarianceExpression& expr) {
  if (expr.terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < expr.terms.size(); ++i) {
    Term t = expr.terms[i];
    if (i == 0) {
      out += to_text(t);
      continue;
    }
    if (sgn(t.coef) < 0) {
      t.coef = -t.coef;
      out += "\n  - ";
    } else {
      out += "\n  + ";
    }
    out += to_text(t);
  }
  return out;
}

IndexPattern::IndexPattern(std::vector<Slot> slots) : slots_(std::move(slots)) {
  for (const auto& s : slots_) {
    if (s.a < 0 || s.b < 0 || s.a + s.b == 0) {
      throw DomainError("index pattern slot must have a,b >= 0 and a+b >= 1");
    }
  }
  std::sort(slots_.begin(), slots_.end());
}

int IndexPattern::k() const {
  int k = 0;
  for (const auto& s : slots_) k += s.a;
  return k;
}

int IndexPattern::l() const {
  int l = 0;
  for (const auto& s : slots_) l += s.b;
  return l;
}

bool IndexPattern::satisfies_conditions() const {
  bool shared = false;
  for (const auto& s : slots_) {
    if (s.a + s.b < 2) return false;
    if (s.a >= 1 && s.b >= 1) shared = true;
  }
  return shared;
}

void validate(const DistributionSpec& d) {
  if (const auto* g = std::get_if<ShiftedGeometric>(&d)) {
    if (!(sgn(g->p) > 0 && g->p < 1)) {
      throw DomainError("geometric p must lie in (0,1)");
    }
  } else {
    const auto& u = std::get<DiscreteUniform>(d);
    if (!(u.a >= 1 && u.a <= u.b)) {
      throw DomainError("uniform requires 1 <= a <= b");
    }
  }
}

Rational parse_rational(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw ParseError("empty number");
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      BigInt num(s.substr(0, slash), 10);
      BigInt den(s.substr(slash + 1), 10);
      if (den == 0) throw ParseError("zero denominator in '" + text + "'");
      Rational q(num, den);
      q.canonicalize();
      return q;
    }
    // Decimal with optional exponent, converted exactly.
    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
    std::string digits;
    int scale = 0;
    bool seen_point = false;
    for (; pos < s.size() && s[pos] != 'e' && s[pos] != 'E'; ++pos) {
      if (s[pos] == '.') {
        if (seen_point) throw ParseError("malformed number '" + text + "'");
        seen_point = true;
      } else if (std::isdigit(static_cast<unsigned char>(s[pos]))) {
        digits += s[pos];
        if (seen_point) ++scale;
      } else {
        throw ParseError("malformed number '" + text + "'");
      }
    }
    if (digits.empty()) throw ParseError("malformed number '" + text + "'");
    if (pos < s.size()) scale -= std::stoi(s.substr(pos + 1));
    BigInt num(digits, 10);
    BigInt pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(scale)));
    Rational q = scale >= 0 ? Rational(num, pow10) : Rational(num * pow10);
    q.canonicalize();
    return negative ? Rational(-q) : q;
  } catch (const std::invalid_argument&) {
    throw ParseError("malformed number '" + text + "'");
  } catch (const std::out_of_range&) {
    throw ParseError("malformed number '" + text + "'");
  }
}

std::string to_decimal(const Rational& q, int digits) {
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  Rational scaled = abs(q) * scale;
  // round half away from zero
  BigInt n = scaled.get_num() * 2 + scaled.get_den();
  BigInt d = scaled.get_den() * 2;
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  std::string s = r.get_str();
  if (digits > 0) {
    if (static_cast<int>(s.size()) <= digits) {
      s.insert(0, static_cast<std::size_t>(digits + 1) - s.size(), '0');
    }
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  }
  if (sgn(q) < 0 && r != 0) s.insert(0, "-");
  return s;
}

namespace {

std::map<std::string, std::string> parse_params(const std::string& body,
                                                const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ParseError("malformed distribution '" + text + "'");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

std::int64_t parse_int(const std::string& s, const std::string& text) {
  try {
    std::size_t used = 0;
    auto v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("malformed integer in distribution '" + text + "'");
  }
}

}  // namespace

DistributionSpec parse_distribution(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ParseError("distribution must look like geom:p=.. or uniform:a=..,b=..");
  }
  const std::string kind = text.substr(0, colon);
  auto params = parse_params(text.substr(colon + 1), text);
  DistributionSpec d;
  if (kind == "geom" && params.size() == 1 && params.count("p")) {
    d = ShiftedGeometric{parse_rational(params["p"])};
  } else if (kind == "uniform" && params.size() == 2 && params.count("a") &&
             params.count("b")) {
    d = DiscreteUniform{parse_int(params["a"], text), parse_int(params["b"], text)};
  } else {
    throw ParseError("unknown distribution '" + text + "'");
  }
  try {
    validate(d);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  return d;
}

std::string to_string(const DistributionSpec& d) {
  if (const auto* g = std::get_if<ShiftedGeometric>(&d)) {
    return "geom:p=" + g->p.get_str();
  }
  const auto& u = std::get<DiscreteUniform>(d);
  return "uniform:a=" + std::to_string(u.a) + ",b=" + std::to_string(u.b);
}

std::string method_label(Method m, int order) {
  return m == Method::kRatio ? "ratio" : "taylor" + std::to_string(order);
}

}  // namespace mrt
