#include "pgsos/error.hpp"

namespace pgsos {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::syntax_error: return "SyntaxError";
    case ErrorKind::undeclared_symbol: return "UndeclaredSymbol";
    case ErrorKind::arity_mismatch: return "ArityMismatch";
    case ErrorKind::kind_mismatch: return "KindMismatch";
    case ErrorKind::invalid_rule: return "InvalidRule";
    case ErrorKind::invalid_distribution: return "InvalidDistribution";
    case ErrorKind::state_limit_exceeded: return "StateLimitExceeded";
    case ErrorKind::depth_limit_exceeded: return "DepthLimitExceeded";
    case ErrorKind::truncated_fragment: return "TruncatedFragment";
    case ErrorKind::unindexed_state: return "UnindexedState";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::empty_genset: return "EmptyGenSet";
    case ErrorKind::untracked_subterm: return "UntrackedSubterm";
    case ErrorKind::iteration_limit_exceeded: return "IterationLimitExceeded";
    case ErrorKind::unsupported_modulus_shape: return "UnsupportedModulusShape";
    case ErrorKind::all_samples_skipped: return "AllSamplesSkipped";
    case ErrorKind::invalid_argument: return "InvalidArgument";
  }
  return "Unknown";
}

ParseError::ParseError(ErrorKind kind, SourceLocation where, const std::string& message)
    : Error(kind, std::to_string(where.line) + ":" + std::to_string(where.column) + ": " +
                      std::string(to_string(kind)) + ": " + message),
      where_(where),
      detail_(message) {}

}  // namespace pgsos
