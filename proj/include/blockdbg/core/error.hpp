#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blockdbg {

enum class ErrorKind {
  kSyntax,
  kValidation,
  kNotFound,
  kRejectedEdit,
  kInvalidProgram,
  kUnresolvedName,
  kNothingRunnable,
  kNotPaused,
  kAtTopFrame,
  kUnknownBlockId,
  kUnknownWatchId,
  kExpressionParse,
  kOutOfOrderTimestamp,
  kStorage,
  kMalformedLine,
  kHashMismatch,
  kMalformedEnvelope,
  kUnknownCommand,
  kDegenerateMargin,
  kEmptyGroup,
  kSubjectSetMismatch,
  kRosterMismatch,
  kPortInUse,
};

std::string_view error_kind_name(ErrorKind kind);

// Every failure surfaced by the library is an Error carrying its kind, so
// the protocol and CLI layers can map failures without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace blockdbg
