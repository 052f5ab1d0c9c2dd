#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pgsos {

enum class ErrorKind {
  syntax_error,
  undeclared_symbol,
  arity_mismatch,
  kind_mismatch,
  invalid_rule,
  invalid_distribution,
  state_limit_exceeded,
  depth_limit_exceeded,
  truncated_fragment,
  unindexed_state,
  no_convergence,
  empty_genset,
  untracked_subterm,
  iteration_limit_exceeded,
  unsupported_modulus_shape,
  all_samples_skipped,
  invalid_argument,
};

std::string_view to_string(ErrorKind kind);

/// Base of every exception raised by the library. The kind is what callers
/// dispatch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct SourceLocation {
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Error tied to a position in some input text (spec file or term string).
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, SourceLocation where, const std::string& message);

  const SourceLocation& where() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  SourceLocation where_;
  std::string detail_;
};

}  // namespace pgsos
