#include "blockdbg/analytics/usage.hpp"

#include "blockdbg/core/error.hpp"

namespace blockdbg::analytics {
namespace {

struct FunctionNames {
  DebuggerFunction f;
  std::string_view name;
  std::string_view title;
};

constexpr std::array<FunctionNames, 6> kNames = {{
    {DebuggerFunction::kBreakpoint, "breakpoint", "Breakpoint"},
    {DebuggerFunction::kContinue, "continue", "Continue"},
    {DebuggerFunction::kStepOver, "step_over", "Step Over"},
    {DebuggerFunction::kStepIn, "step_in", "Step In"},
    {DebuggerFunction::kStepOut, "step_out", "Step Out"},
    {DebuggerFunction::kWatchExpression, "watch_expression", "Watch Expression"},
}};

std::optional<DebuggerFunction> function_for(EventKind kind) {
  switch (kind) {
    case EventKind::kBreakpointSet: return DebuggerFunction::kBreakpoint;
    case EventKind::kContinue: return DebuggerFunction::kContinue;
    case EventKind::kStepOver: return DebuggerFunction::kStepOver;
    case EventKind::kStepIn: return DebuggerFunction::kStepIn;
    case EventKind::kStepOut: return DebuggerFunction::kStepOut;
    case EventKind::kWatchAdd: return DebuggerFunction::kWatchExpression;
    default: return std::nullopt;
  }
}

}  // namespace

std::string_view function_name(DebuggerFunction f) { return kNames[static_cast<std::size_t>(f)].name; }
std::string_view function_title(DebuggerFunction f) { return kNames[static_cast<std::size_t>(f)].title; }

std::optional<DebuggerFunction> function_from_name(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.f;
  }
  if (name == "continue_") return DebuggerFunction::kContinue;
  return std::nullopt;
}

UsageTally tally_usage(const SessionLog& log) {
  UsageTally tally;
  if (!log.events.empty()) {
    tally.subject_id = log.events.front().subject_id;
    tally.group = log.events.front().group;
  }
  for (const auto& e : log.events) {
    if (auto f = function_for(e.kind)) ++tally[*f];
  }
  return tally;
}

void accumulate(UsageTally& into, const UsageTally& other) {
  for (std::size_t i = 0; i < into.counts.size(); ++i) into.counts[i] += other.counts[i];
}

BinaryUsage binarize(const UsageTally& tally) {
  BinaryUsage out{tally.subject_id, tally.group, {}};
  for (std::size_t i = 0; i < tally.counts.size(); ++i) out.used[i] = tally.counts[i] >= 1;
  return out;
}

ContingencyTable2x2 build_table(std::span<const BinaryUsage> group_a,
                                std::span<const BinaryUsage> group_b, DebuggerFunction f) {
  if (group_a.empty() || group_b.empty()) {
    throw Error(ErrorKind::kEmptyGroup, "both groups need at least one subject");
  }
  ContingencyTable2x2 t;
  for (const auto& u : group_a) (u[f] ? t.a : t.c)++;
  for (const auto& u : group_b) (u[f] ? t.b : t.d)++;
  return t;
}

}  // namespace blockdbg::analytics
