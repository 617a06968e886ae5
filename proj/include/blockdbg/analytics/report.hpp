#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "blockdbg/analytics/assessment.hpp"
#include "blockdbg/analytics/stats.hpp"
#include "blockdbg/analytics/usage.hpp"

namespace blockdbg::analytics {

struct RosterEntry {
  std::string subject_id;
  Group group = Group::kUnspecified;
};

// CSV with header `subject_id,group`; group is A or B.
std::vector<RosterEntry> parse_roster(std::string_view text);
std::vector<RosterEntry> read_roster(const std::string& path);

// CSV with header `subject_id,breakpoint,continue,step_over,step_in,
// step_out,watch_expression` (columns may appear in any order; an optional
// `group` column is accepted).
std::vector<UsageTally> parse_tally_csv(std::string_view text);
std::vector<UsageTally> read_tally_csv(const std::string& path);

// Previously published counts and p-value for one function; the report
// states whether its own tests reproduce the value.
struct ReferenceResult {
  DebuggerFunction function = DebuggerFunction::kBreakpoint;
  std::string label;
  ContingencyTable2x2 table;
  double p_value = 0;
};

// {"references": [{"function": "step_in", "label": "...",
//                  "table": [[a, b], [c, d]], "p_value": 0.038867104}]}
std::vector<ReferenceResult> parse_references(const nlohmann::json& doc);
std::vector<ReferenceResult> read_references(const std::string& path);

// Absolute tolerance for treating a reference p-value as reproduced.
inline constexpr double kReferenceTolerance = 5e-6;

struct FunctionAnalysis {
  DebuggerFunction function = DebuggerFunction::kBreakpoint;
  ContingencyTable2x2 table;
  std::optional<TestResult> chi_squared;
  std::optional<TestResult> fisher;
  std::string test_error;  // set when the tests are undefined for the table
  std::vector<std::string> notes;
};

struct AnalysisInput {
  std::vector<SessionLog> logs;
  std::vector<RosterEntry> roster;
  double alpha = kDefaultAlpha;
  AssessmentRules rules;
  std::vector<ReferenceResult> references;
  std::optional<std::vector<UsageTally>> rater_a;
  std::optional<std::vector<UsageTally>> rater_b;
};

struct AnalysisReport {
  double alpha = kDefaultAlpha;
  std::vector<UsageTally> tallies;  // sorted by subject id
  std::vector<BinaryUsage> binary;
  std::vector<FunctionAnalysis> functions;  // one per DebuggerFunction
  std::vector<ProcedureAssessment> assessments;  // sorted by subject, session
  std::optional<RaterDiff> rater_diff;
  std::vector<std::string> notes;
};

// Throws Error{kRosterMismatch} for logs of unknown subjects or conflicting
// groups, Error{kEmptyGroup} when a group has no subjects.
AnalysisReport analyze(const AnalysisInput& input);

// Deterministic renderings: identical inputs give identical bytes.
nlohmann::json report_to_json(const AnalysisReport& report);
std::string report_to_text(const AnalysisReport& report);

// Fixed 9-decimal rendering used for every p-value in reports.
std::string format_p(double p);

}  // namespace blockdbg::analytics
