#pragma once

#include <string>
#include <vector>

#include "blockdbg/core/error.hpp"
#include "blockdbg/core/program.hpp"

namespace blockdbg {

enum class Severity { kError, kWarning };

struct Diagnostic {
  Severity severity = Severity::kError;
  std::string location;  // block id, or a variable/list/procedure name
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::string to_string(const Diagnostic& d);

// Checks every program invariant. Returns an empty list iff all hold.
std::vector<Diagnostic> validate(const Program& program);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

// Thrown when a program fails validation; carries the full diagnostic list.
class ValidationError : public Error {
 public:
  ValidationError(ErrorKind kind, std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace blockdbg
