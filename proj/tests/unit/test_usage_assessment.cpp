#include <doctest.h>

#include "blockdbg/analytics/assessment.hpp"
#include "blockdbg/analytics/usage.hpp"
#include "blockdbg/core/error.hpp"
#include "fixtures.hpp"
#include "study.hpp"

using namespace blockdbg;
using namespace blockdbg::analytics;
using blockdbg::testing::corpus_path;

namespace {

SessionLog log_of(std::initializer_list<EventKind> kinds) {
  SessionLog log;
  std::int64_t ts = 0;
  for (EventKind k : kinds) {
    LogEvent e;
    e.timestamp = ts++;
    e.session_id = "s";
    e.subject_id = "S01";
    e.group = Group::kA;
    e.kind = k;
    log.events.push_back(e);
  }
  return log;
}

BinaryUsage subject_using(bool used, DebuggerFunction f, Group g) {
  BinaryUsage b;
  b.group = g;
  b.used[static_cast<std::size_t>(f)] = used;
  return b;
}

std::vector<BinaryUsage> group(int used, int total, DebuggerFunction f, Group g) {
  std::vector<BinaryUsage> out;
  for (int i = 0; i < total; ++i) out.push_back(subject_using(i < used, f, g));
  return out;
}

SessionLog fixture(const std::string& name) {
  return read_log(corpus_path("sessions/" + name + ".dbglog.jsonl"), true).log;
}

}  // namespace

TEST_CASE("tally_usage") {
  UsageTally three = tally_usage(log_of({EventKind::kSessionStart, EventKind::kStepIn, EventKind::kStepIn,
                                         EventKind::kStepIn, EventKind::kSessionEnd}));
  CHECK(three[DebuggerFunction::kStepIn] == 3);
  int others = 0;
  for (auto f : kAllFunctions) others += f == DebuggerFunction::kStepIn ? 0 : three[f];
  CHECK(others == 0);
  CHECK(three.subject_id == "S01");
  CHECK(three.group == Group::kA);

  UsageTally scripted = tally_usage(fixture("scripted_sum_list"));
  CHECK(scripted[DebuggerFunction::kBreakpoint] == 2);
  CHECK(scripted[DebuggerFunction::kContinue] == 1);
  CHECK(scripted[DebuggerFunction::kStepOver] == 1);
  CHECK(scripted[DebuggerFunction::kWatchExpression] == 1);
  CHECK(scripted[DebuggerFunction::kStepIn] == 0);

  UsageTally empty = tally_usage(log_of({EventKind::kSessionStart, EventKind::kSessionEnd}));
  for (auto f : kAllFunctions) CHECK(empty[f] == 0);

  UsageTally sum = three;
  accumulate(sum, scripted);
  CHECK(sum[DebuggerFunction::kStepIn] == 3);
  CHECK(sum[DebuggerFunction::kBreakpoint] == 2);
}

TEST_CASE("binarize") {
  UsageTally t;
  t[DebuggerFunction::kStepIn] = 3;
  BinaryUsage b = binarize(t);
  for (auto f : kAllFunctions) CHECK(b[f] == (f == DebuggerFunction::kStepIn));
  BinaryUsage none = binarize(UsageTally{});
  for (auto f : kAllFunctions) CHECK_FALSE(none[f]);
  UsageTally two;
  two[DebuggerFunction::kBreakpoint] = 1;
  two[DebuggerFunction::kContinue] = 7;
  BinaryUsage both = binarize(two);
  CHECK(both[DebuggerFunction::kBreakpoint]);
  CHECK(both[DebuggerFunction::kContinue]);
}

TEST_CASE("build_table") {
  auto f = DebuggerFunction::kStepIn;
  CHECK(build_table(group(10, 10, f, Group::kA), group(5, 10, f, Group::kB), f) ==
        ContingencyTable2x2{10, 5, 0, 5});
  auto c = DebuggerFunction::kContinue;
  CHECK(build_table(group(0, 10, c, Group::kA), group(6, 10, c, Group::kB), c) ==
        ContingencyTable2x2{0, 6, 10, 4});
  ContingencyTable2x2 all = build_table(group(4, 4, f, Group::kA), group(7, 7, f, Group::kB), f);
  CHECK(all.c == 0);
  CHECK(all.d == 0);
  try {
    build_table({}, group(1, 2, f, Group::kB), f);
    FAIL("expected empty group");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmptyGroup);
  }
}

TEST_CASE("function names") {
  for (auto f : kAllFunctions) CHECK(function_from_name(function_name(f)) == f);
  CHECK(function_from_name("continue_") == DebuggerFunction::kContinue);
  CHECK(function_title(DebuggerFunction::kStepIn) == "Step In");
}

TEST_CASE("procedure assessment on hand-scripted logs") {
  ProcedureAssessment full = assess_procedure(fixture("assess_full_procedure"));
  CHECK(full.step3_breakpoint_inserted);
  CHECK(full.step4_intention);
  CHECK(full.step5_bug_fixed);
  CHECK_FALSE(full.step5_evidence.empty());

  ProcedureAssessment no_run = assess_procedure(fixture("assess_breakpoint_no_run"));
  CHECK(no_run.step3_breakpoint_inserted);
  CHECK_FALSE(no_run.step4_intention);
  CHECK_FALSE(no_run.step5_bug_fixed);

  ProcedureAssessment edit_only = assess_procedure(fixture("assess_edit_without_run"));
  CHECK(edit_only.step3_breakpoint_inserted);
  CHECK(edit_only.step4_intention);
  CHECK_FALSE(edit_only.step5_bug_fixed);
}

TEST_CASE("assessment rules") {
  // Inspection after a continue does not count as intent for that hit.
  SessionLog late = log_of({EventKind::kBreakpointSet, EventKind::kRunStart, EventKind::kBreakpointHit,
                            EventKind::kContinue, EventKind::kWatchEval});
  CHECK_FALSE(assess_procedure(late).step4_intention);

  SessionLog far = log_of({EventKind::kBreakpointSet, EventKind::kBreakpointHit, EventKind::kOutput,
                           EventKind::kOutput, EventKind::kWatchEval});
  CHECK(assess_procedure(far).step4_intention);
  AssessmentRules tight;
  tight.inspection_window = 2;
  CHECK_FALSE(assess_procedure(far, tight).step4_intention);

  // A rejected edit is not a fix.
  SessionLog rejected = log_of({EventKind::kProgramEdit, EventKind::kRunStart});
  rejected.events[0].payload = {{"ok", false}};
  CHECK_FALSE(assess_procedure(rejected).step5_bug_fixed);
}

TEST_CASE("compare_raters") {
  UsageTally s1;
  s1.subject_id = "S01";
  s1[DebuggerFunction::kContinue] = 3;
  UsageTally s2;
  s2.subject_id = "S02";
  std::vector<UsageTally> a = {s1, s2};

  RaterDiff same = compare_raters(a, a);
  CHECK(same.flips.empty());
  for (const auto& c : same.cells) CHECK(c.delta == 0);
  CHECK(same.cells.size() == 12);

  std::vector<UsageTally> b = a;
  b[1][DebuggerFunction::kStepIn] = 1;
  b[0][DebuggerFunction::kContinue] = 2;
  RaterDiff diff = compare_raters(b, a);
  REQUIRE(diff.flips.size() == 1);
  CHECK(diff.flips[0] == std::pair<std::string, DebuggerFunction>{"S02", DebuggerFunction::kStepIn});
  int nonzero = 0;
  for (const auto& c : diff.cells) {
    if (c.delta == 0) continue;
    ++nonzero;
    if (c.function == DebuggerFunction::kContinue) CHECK(c.delta == -1);
    if (c.function == DebuggerFunction::kStepIn) CHECK(c.delta == 1);
  }
  CHECK(nonzero == 2);

  std::vector<UsageTally> missing = {s1};
  try {
    compare_raters(a, missing);
    FAIL("expected subject-set mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSubjectSetMismatch);
  }
}
