#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace modgraph {

enum class ErrorCode {
  kVertexNotInGraph,
  kEmptySet,
  kSizeLimitExceeded,
  kInvalidGraph,
  kParseError,
  kArityMismatch,
  kUnknownOp,
  kUnknownSymbol,
  kInvalidSignature,
  kNotWeaklyRigid,
  kTooSmall,
  kNotAModule,
  kNotInSignature,
  kOverlappingOperands,
  kInvalidAlgebra,
  kUnvalidatedAlgebra,
  kSyntaxError,
  kUnknownPredicate,
  kUnboundVariable,
  kSortMismatch,
  kBudgetExceeded,
  kInvalidArgument,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kVertexNotInGraph: return "VertexNotInGraph";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kSizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorCode::kInvalidGraph: return "InvalidGraph";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kUnknownOp: return "UnknownOp";
    case ErrorCode::kUnknownSymbol: return "UnknownSymbol";
    case ErrorCode::kInvalidSignature: return "InvalidSignature";
    case ErrorCode::kNotWeaklyRigid: return "NotWeaklyRigid";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kNotAModule: return "NotAModule";
    case ErrorCode::kNotInSignature: return "NotInSignature";
    case ErrorCode::kOverlappingOperands: return "OverlappingOperands";
    case ErrorCode::kInvalidAlgebra: return "InvalidAlgebra";
    case ErrorCode::kUnvalidatedAlgebra: return "UnvalidatedAlgebra";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kUnknownPredicate: return "UnknownPredicate";
    case ErrorCode::kUnboundVariable: return "UnboundVariable";
    case ErrorCode::kSortMismatch: return "SortMismatch";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. The code is the
/// stable, machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace modgraph
