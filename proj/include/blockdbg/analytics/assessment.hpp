#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blockdbg/analytics/usage.hpp"

namespace blockdbg::analytics {

// Detection rules for the debugging-procedure steps that can be observed in
// a log: placing a breakpoint, using it, and fixing the bug.
struct AssessmentRules {
  // How many events after a breakpoint_hit may hold the inspection that
  // shows intent. Unset: up to the next continue or run_end.
  std::optional<std::size_t> inspection_window;
};

struct ProcedureAssessment {
  std::string subject_id;
  std::string session_id;
  bool step3_breakpoint_inserted = false;
  bool step4_intention = false;
  bool step5_bug_fixed = false;
  // Indices into the log's events supporting each true flag.
  std::vector<std::size_t> step3_evidence;
  std::vector<std::size_t> step4_evidence;
  std::vector<std::size_t> step5_evidence;
};

// step3: at least one breakpoint_set.
// step4: a breakpoint_hit followed, before the next continue or run_end, by
//        watch_eval, variable_inspect, step_in, step_over or step_out.
// step5: a program_edit (not rejected) followed later by a run_start.
ProcedureAssessment assess_procedure(const SessionLog& log, const AssessmentRules& rules = {});

struct RaterCell {
  std::string subject_id;
  DebuggerFunction function = DebuggerFunction::kBreakpoint;
  int count_a = 0;
  int count_b = 0;
  int delta = 0;  // count_a - count_b
};

struct RaterDiff {
  std::vector<RaterCell> cells;  // sorted by subject, then function
  // (subject, function) pairs whose used/not-used classification differs.
  std::vector<std::pair<std::string, DebuggerFunction>> flips;
};

// Throws Error{kSubjectSetMismatch} unless both lists cover the same subjects.
RaterDiff compare_raters(const std::vector<UsageTally>& rater_a,
                         const std::vector<UsageTally>& rater_b);

}  // namespace blockdbg::analytics
