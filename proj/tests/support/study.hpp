#pragma once

#include <string>
#include <vector>

#include "blockdbg/analytics/report.hpp"
#include "blockdbg/log/session_log.hpp"

namespace blockdbg::testing {

// Synthetic two-group study (invented data): 10 subjects per group debug
// the index-bug program. Counts per function are chosen so the continue
// and step-in tables come out as
//   continue: used A 0 / B 6, not used A 10 / B 4
//   step in:  used A 10 / B 5, not used A 0 / B 5
struct Study {
  std::vector<SessionLog> logs;  // one per subject, ordered S01..S20
  std::vector<analytics::RosterEntry> roster;
};

// Deterministic: identical bytes on every call.
Study synthetic_study();

// Expected binary usage counts {A used, B used} per function, in
// kAllFunctions order.
std::vector<std::pair<int, int>> synthetic_study_usage();

// Engine-produced session on sum_list: two breakpoints, one continue.
SessionLog scripted_sum_list_log();

// Tally CSV text in the column order analytics reads back.
std::string tally_csv(const std::vector<analytics::UsageTally>& tallies);

// Writes logs/<subject>.dbglog.jsonl and roster.csv under `dir`.
void write_study(const Study& study, const std::string& dir);

}  // namespace blockdbg::testing
