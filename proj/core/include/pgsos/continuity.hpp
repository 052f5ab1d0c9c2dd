#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pgsos/denotation.hpp"
#include "pgsos/multiplicity.hpp"
#include "pgsos/spec.hpp"

namespace pgsos {

/// z(e1..en) = min(c1 e1 + ... + cn en, 1).
struct ModulusSpec {
  std::vector<ExtRational> coefficients;

  std::size_t arity() const { return coefficients.size(); }
  /// Throws Error(invalid_argument) on an infinite coefficient or a length
  /// mismatch.
  Rational evaluate(const std::vector<Rational>& eps) const;
  /// `min(1/2*e1 + e2, 1)`; `0` for an all-zero modulus.
  std::string to_string() const;

  friend bool operator==(const ModulusSpec&, const ModulusSpec&) = default;
};

/// Accepts `c1*e1 + ... + cn*en` (coefficients optional, terms in any order,
/// repeated variables add up), optionally wrapped as `min(..., 1)`.
/// Throws Error(unsupported_modulus_shape) for anything that is not of that
/// linear capped form and Error(invalid_argument) for e_k with k > arity.
ModulusSpec parse_modulus(std::string_view text, std::size_t arity);

enum class Verdict { uniformly_continuous, not_shown };
std::string_view to_string(Verdict v);

struct ContinuityReport {
  std::string op;
  std::size_t arity = 0;
  Verdict verdict = Verdict::not_shown;
  /// Weighted sup of [[op(x1..xn)]] at each argument.
  std::vector<ExtRational> coefficients;
  /// Smallest n with [[op(x1..xn)]] below n copies of every argument.
  std::optional<Rational> bound;
  ModulusSpec modulus;
  GenSet denotation;
  bool widened = false;
  bool over_approximated = false;
  /// Some argument is copied without bound, the situation in which
  /// replication fails to be continuous.
  bool unbounded_replication = false;
  std::string reason;
};

struct ModulusCheck {
  bool satisfied = false;
  std::vector<ExtRational> required;  // weighted sup per argument
  std::vector<ExtRational> allowed;   // derived multiplicity of z per argument
  std::vector<std::size_t> failing;   // zero-based argument positions
};

/// Per-operator compositionality properties from one denotation fixed point.
class ContinuityAnalyzer {
 public:
  /// Throws what lfp_denotations throws.
  explicit ContinuityAnalyzer(const SpecDocument& doc, const FixpointConfig& config = {});

  /// Throws Error(undeclared_symbol) for an unknown operator.
  std::vector<ExtRational> weighted_sup(const std::string& op) const;
  ModulusSpec derive_modulus(const std::string& op) const;
  ContinuityReport is_uniformly_continuous(const std::string& op) const;
  /// Throws Error(invalid_argument) if the modulus arity differs from the
  /// operator's.
  ModulusCheck check_modulus(const std::string& op, const ModulusSpec& z) const;
  /// One report per operator, in declaration order.
  std::vector<ContinuityReport> reports() const;

  const DenotationResult& denotations() const { return result_; }

 private:
  std::size_t arity(const std::string& op) const;

  const SpecDocument& doc_;
  DenotationResult result_;
};

}  // namespace pgsos
