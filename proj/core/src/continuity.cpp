#include "pgsos/continuity.hpp"

#include <algorithm>
#include <cctype>

namespace pgsos {

Rational ModulusSpec::evaluate(const std::vector<Rational>& eps) const {
  if (eps.size() != coefficients.size()) throw Error(ErrorKind::invalid_argument, "modulus arity mismatch");
  Rational sum(0);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (coefficients[i].is_infinite()) {
      throw Error(ErrorKind::invalid_argument, "modulus has an infinite coefficient");
    }
    sum += coefficients[i].value() * eps[i];
  }
  return min(sum, Rational(1));
}

std::string ModulusSpec::to_string() const {
  std::string sum;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    const auto& c = coefficients[i];
    if (!c.is_infinite() && c.value().is_zero()) continue;
    if (!sum.empty()) sum += " + ";
    if (c.is_infinite()) {
      sum += "inf*";
    } else if (c.value() != Rational(1)) {
      sum += c.value().to_string() + "*";
    }
    sum += "e" + std::to_string(i + 1);
  }
  return sum.empty() ? "0" : "min(" + sum + ", 1)";
}

namespace {

class ModulusParser {
 public:
  ModulusParser(std::string_view text, std::size_t arity) : text_(text), arity_(arity) {}

  ModulusSpec parse() {
    ModulusSpec z;
    z.coefficients.assign(arity_, ExtRational(Rational(0)));
    skip();
    if (word_ahead("min")) {
      pos_ += 3;
      expect('(');
      linear(z);
      expect(',');
      const Rational cap = number();
      if (cap != Rational(1)) unsupported("only a cap of 1 is supported");
      expect(')');
    } else {
      linear(z);
    }
    if (pos_ != text_.size()) unsupported("unexpected '" + std::string(text_.substr(pos_)) + "'");
    return z;
  }

 private:
  [[noreturn]] void unsupported(const std::string& why) const {
    throw Error(ErrorKind::unsupported_modulus_shape,
                "modulus '" + std::string(text_) + "' is not of the form min(c1*e1 + ... + cn*en, 1): " + why);
  }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at(char c) const { return pos_ < text_.size() && text_[pos_] == c; }
  bool word_ahead(std::string_view w) const { return text_.substr(pos_, w.size()) == w; }
  void expect(char c) {
    if (!at(c)) unsupported(std::string("expected '") + c + "'");
    ++pos_;
    skip();
  }

  Rational number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                   text_[pos_] == '/')) {
      ++pos_;
    }
    const auto value = Rational::parse(text_.substr(start, pos_ - start));
    if (!value) unsupported("malformed number");
    skip();
    return *value;
  }

  std::size_t variable() {
    if (!at('e')) unsupported("expected a variable e1..e" + std::to_string(arity_));
    ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) unsupported("expected a variable e1..e" + std::to_string(arity_));
    const std::size_t k = std::stoul(std::string(text_.substr(start, pos_ - start)));
    if (k == 0 || k > arity_) {
      throw Error(ErrorKind::invalid_argument,
                  "e" + std::to_string(k) + " is not an argument of an operator of arity " + std::to_string(arity_));
    }
    skip();
    return k - 1;
  }

  void linear(ModulusSpec& z) {
    while (true) {
      Rational coeff(1);
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        coeff = number();
        if (!at('*')) unsupported("constant terms make z(0) nonzero");
        expect('*');
      }
      const std::size_t k = variable();
      if (at('*')) unsupported("products are not linear");
      z.coefficients[k] = ExtRational(z.coefficients[k].value() + coeff);
      if (!at('+')) return;
      expect('+');
    }
  }

  std::string_view text_;
  std::size_t arity_;
  std::size_t pos_ = 0;
};

}  // namespace

ModulusSpec parse_modulus(std::string_view text, std::size_t arity) { return ModulusParser(text, arity).parse(); }

std::string_view to_string(Verdict v) {
  return v == Verdict::uniformly_continuous ? "uniformly-continuous" : "not-shown";
}

namespace {

std::vector<AnyTerm> operator_queries(const SpecDocument& doc) {
  std::vector<AnyTerm> out;
  for (const auto& [op, arity] : doc.sig.operators()) out.emplace_back(operator_term(op, arity));
  return out;
}

}  // namespace

ContinuityAnalyzer::ContinuityAnalyzer(const SpecDocument& doc, const FixpointConfig& config)
    : doc_(doc), result_(lfp_denotations(doc, operator_queries(doc), config)) {}

std::size_t ContinuityAnalyzer::arity(const std::string& op) const {
  const auto n = doc_.sig.arity(op);
  if (!n) throw Error(ErrorKind::undeclared_symbol, "undeclared operator '" + op + "'");
  return *n;
}

std::vector<ExtRational> ContinuityAnalyzer::weighted_sup(const std::string& op) const {
  const std::size_t n = arity(op);
  const Weighting w = weighting(sup_approx(result_.denotation(operator_term(op, n)).generators()));
  std::vector<ExtRational> out;
  for (const auto& v : argument_vars(n)) out.push_back(weight_at(w, v));
  return out;
}

ModulusSpec ContinuityAnalyzer::derive_modulus(const std::string& op) const { return {weighted_sup(op)}; }

ContinuityReport ContinuityAnalyzer::is_uniformly_continuous(const std::string& op) const {
  ContinuityReport r;
  r.op = op;
  r.arity = arity(op);
  const StateTerm term = operator_term(op, r.arity);
  r.denotation = result_.denotation(term);
  r.coefficients = weighted_sup(op);
  r.modulus = {r.coefficients};
  r.widened = result_.widened(term);
  bool exact_sup = true;
  sup_approx(r.denotation.generators(), &exact_sup);
  r.over_approximated = result_.over_approximated(term) || !exact_sup;

  // Below n copies of every argument iff every generator's weighting is
  // finite on the arguments (nothing else can occur in the denotation).
  const auto vars = argument_vars(r.arity);
  Rational n(0);
  std::vector<std::string> unbounded;
  for (const auto& p : r.denotation.generators()) {
    for (const auto& [v, w] : weighting(p)) {
      if (w.is_infinite()) {
        if (std::find(unbounded.begin(), unbounded.end(), v.name) == unbounded.end()) unbounded.push_back(v.name);
      } else {
        n = max(n, Rational(mpq_class(w.value().ceil())));
      }
    }
  }
  if (unbounded.empty()) {
    r.verdict = Verdict::uniformly_continuous;
    r.bound = n;
    r.reason = "every argument is copied at most " + n.to_string() + " times";
    return r;
  }
  r.verdict = Verdict::not_shown;
  r.unbounded_replication = true;
  std::string names;
  for (const auto& u : unbounded) names += (names.empty() ? "" : ", ") + u;
  r.reason = "unbounded copies of " + names +
             "; an operator that replicates its argument without bound has distance 1 for any positive "
             "argument distance, so no modulus continuous at 0 exists";
  return r;
}

ModulusCheck ContinuityAnalyzer::check_modulus(const std::string& op, const ModulusSpec& z) const {
  ModulusCheck out;
  out.required = weighted_sup(op);
  if (z.arity() != out.required.size()) {
    throw Error(ErrorKind::invalid_argument, "modulus has " + std::to_string(z.arity()) + " arguments, operator '" +
                                                 op + "' has " + std::to_string(out.required.size()));
  }
  // For min(sum c_i e_i, 1) the derived multiplicity is c itself.
  out.allowed = z.coefficients;
  for (std::size_t i = 0; i < out.required.size(); ++i) {
    if (out.required[i] > out.allowed[i]) out.failing.push_back(i);
  }
  out.satisfied = out.failing.empty();
  return out;
}

std::vector<ContinuityReport> ContinuityAnalyzer::reports() const {
  std::vector<ContinuityReport> out;
  for (const auto& [op, n] : doc_.sig.operators()) out.push_back(is_uniformly_continuous(op));
  return out;
}

}  // namespace pgsos
