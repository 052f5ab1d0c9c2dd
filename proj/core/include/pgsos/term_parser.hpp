#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>

#include "pgsos/lexer.hpp"
#include "pgsos/terms.hpp"

namespace pgsos {

using Abbreviations = std::map<std::string, StateTerm, std::less<>>;

/// Names visible while parsing a term. An identifier that is a declared
/// operator is an application; an abbreviation expands in state position;
/// anything else is a variable of the kind the position requires.
struct TermScope {
  const Signature& sig;
  const Abbreviations* abbreviations = nullptr;
};

StateTerm parse_state_term(TokenStream& in, const TermScope& scope);
DistTerm parse_dist_term(TokenStream& in, const TermScope& scope);

/// Parse a complete string; trailing tokens are a syntax error.
StateTerm parse_state_term(std::string_view text, const Signature& sig,
                           const Abbreviations* abbreviations = nullptr);
DistTerm parse_dist_term(std::string_view text, const Signature& sig,
                         const Abbreviations* abbreviations = nullptr);

}  // namespace pgsos
