#pragma once

#include <string>
#include <vector>

#include "pgsos/spec.hpp"

namespace pgsos::detail {

/// Members of `expr`, in alphabet order. Throws ParseError(undeclared_symbol).
std::vector<std::string> evaluate_set(const SetExpr& expr, const Signature& sig,
                                      const std::vector<NamedSet>& sets);

}  // namespace pgsos::detail
