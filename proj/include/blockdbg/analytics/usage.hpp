#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blockdbg/log/session_log.hpp"

namespace blockdbg::analytics {

enum class DebuggerFunction { kBreakpoint, kContinue, kStepOver, kStepIn, kStepOut, kWatchExpression };

inline constexpr std::array<DebuggerFunction, 6> kAllFunctions = {
    DebuggerFunction::kBreakpoint, DebuggerFunction::kContinue, DebuggerFunction::kStepOver,
    DebuggerFunction::kStepIn,     DebuggerFunction::kStepOut,  DebuggerFunction::kWatchExpression,
};

std::string_view function_name(DebuggerFunction f);
// Table heading, e.g. "Step In".
std::string_view function_title(DebuggerFunction f);
std::optional<DebuggerFunction> function_from_name(std::string_view name);

// Bumped whenever the event-to-function mapping in tally_usage changes.
inline constexpr int kCountingRulesVersion = 1;

struct UsageTally {
  std::string subject_id;
  Group group = Group::kUnspecified;
  std::array<int, 6> counts{};

  int& operator[](DebuggerFunction f) { return counts[static_cast<std::size_t>(f)]; }
  int operator[](DebuggerFunction f) const { return counts[static_cast<std::size_t>(f)]; }

  friend bool operator==(const UsageTally&, const UsageTally&) = default;
};

struct BinaryUsage {
  std::string subject_id;
  Group group = Group::kUnspecified;
  std::array<bool, 6> used{};

  bool operator[](DebuggerFunction f) const { return used[static_cast<std::size_t>(f)]; }
};

// Counting rules (version 1): breakpoint = breakpoint_set events,
// continue/step_over/step_in/step_out = events of the same kind,
// watch_expression = watch_add events. Rejected attempts count too.
UsageTally tally_usage(const SessionLog& log);

// Adds `other`'s counts into `into` (several sessions of one subject).
void accumulate(UsageTally& into, const UsageTally& other);

BinaryUsage binarize(const UsageTally& tally);

// Rows {used, not used}, columns {group A (with tool), group B (without)}:
//   a = A used, b = B used, c = A not used, d = B not used.
struct ContingencyTable2x2 {
  int a = 0;
  int b = 0;
  int c = 0;
  int d = 0;

  int total() const { return a + b + c + d; }
  friend bool operator==(const ContingencyTable2x2&, const ContingencyTable2x2&) = default;
};

// Throws Error{kEmptyGroup} when either list is empty.
ContingencyTable2x2 build_table(std::span<const BinaryUsage> group_a,
                                std::span<const BinaryUsage> group_b, DebuggerFunction f);

}  // namespace blockdbg::analytics
