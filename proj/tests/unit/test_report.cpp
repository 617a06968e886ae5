#include <doctest.h>

#include <functional>

#include "blockdbg/analytics/report.hpp"
#include "blockdbg/core/error.hpp"
#include "fixtures.hpp"
#include "study.hpp"

using namespace blockdbg;
using namespace blockdbg::analytics;

namespace {

AnalysisInput study_input() {
  static const testing::Study study = testing::synthetic_study();
  AnalysisInput in;
  in.logs = study.logs;
  in.roster = study.roster;
  in.references = read_references(testing::corpus_path("analytics/references.json"));
  return in;
}

const FunctionAnalysis& analysis_for(const AnalysisReport& r, DebuggerFunction f) {
  for (const auto& fa : r.functions) {
    if (fa.function == f) return fa;
  }
  throw std::logic_error("missing function");
}

ErrorKind error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kSyntax;
}

}  // namespace

TEST_CASE("format_p uses nine decimals") {
  CHECK(format_p(0.038867103812) == "0.038867104");
  CHECK(format_p(1) == "1.000000000");
}

TEST_CASE("roster and tally parsing") {
  auto roster = parse_roster("subject_id,group\nS01,A\nS02,B\n");
  REQUIRE(roster.size() == 2);
  CHECK(roster[1].group == Group::kB);
  CHECK(error_of([] { parse_roster("subject,group\nS01,A\n"); }) == ErrorKind::kSyntax);
  CHECK(error_of([] { parse_roster("subject_id,group\nS01,C\n"); }) == ErrorKind::kSyntax);
  CHECK(error_of([] { parse_roster("subject_id,group\nS01,A\nS01,B\n"); }) == ErrorKind::kRosterMismatch);

  auto tallies = parse_tally_csv("subject_id,step_in,continue,breakpoint,step_over,step_out,watch_expression\nS01,3,1,0,0,0,2\n");
  REQUIRE(tallies.size() == 1);
  CHECK(tallies[0][DebuggerFunction::kStepIn] == 3);
  CHECK(tallies[0][DebuggerFunction::kWatchExpression] == 2);
}

TEST_CASE("synthetic study reproduces the printed tables") {
  AnalysisReport r = analyze(study_input());
  CHECK(r.tallies.size() == 20);
  const auto& step_in = analysis_for(r, DebuggerFunction::kStepIn);
  CHECK(step_in.table == ContingencyTable2x2{10, 5, 0, 5});
  CHECK(format_p(step_in.chi_squared->p_value) == "0.038867104");
  REQUIRE(step_in.notes.size() == 1);
  CHECK(step_in.notes[0].find("reproduced by chi-squared (Yates)") != std::string::npos);

  const auto& cont = analysis_for(r, DebuggerFunction::kContinue);
  CHECK(cont.table == ContingencyTable2x2{0, 6, 10, 4});
  REQUIRE(cont.notes.size() == 1);
  CHECK(cont.notes[0].find("0.055829295 is NOT reproduced") != std::string::npos);
  CHECK(cont.notes[0].find("0.014697422") != std::string::npos);
  CHECK(cont.notes[0].find("0.010835913") != std::string::npos);

  auto usage = testing::synthetic_study_usage();
  for (std::size_t i = 0; i < kAllFunctions.size(); ++i) {
    const auto& fa = analysis_for(r, kAllFunctions[i]);
    CHECK(fa.table.a == usage[i].first);
    CHECK(fa.table.b == usage[i].second);
    CHECK(fa.table.a + fa.table.c == 10);
    CHECK(fa.table.b + fa.table.d == 10);
  }
  CHECK(r.assessments.size() == 20);
}

TEST_CASE("reports are byte-stable") {
  AnalysisReport one = analyze(study_input());
  AnalysisReport two = analyze(study_input());
  CHECK(report_to_text(one) == report_to_text(two));
  CHECK(report_to_json(one).dump() == report_to_json(two).dump());
  CHECK(report_to_text(one).find("Step In") != std::string::npos);
}

TEST_CASE("roster is authoritative") {
  AnalysisInput in = study_input();
  in.roster.pop_back();  // S20 now unknown
  CHECK(error_of([&] { analyze(in); }) == ErrorKind::kRosterMismatch);

  AnalysisInput wrong = study_input();
  wrong.roster[0].group = Group::kB;
  CHECK(error_of([&] { analyze(wrong); }) == ErrorKind::kRosterMismatch);

  AnalysisInput extra = study_input();
  extra.roster.push_back({"S99", Group::kB});
  AnalysisReport r = analyze(extra);
  CHECK(r.tallies.size() == 21);
  CHECK_FALSE(r.notes.empty());
}

TEST_CASE("single-group input is an empty-group error") {
  AnalysisInput in = study_input();
  std::vector<SessionLog> a_only;
  std::vector<RosterEntry> roster;
  for (std::size_t i = 0; i < 10; ++i) {
    a_only.push_back(in.logs[i]);
    roster.push_back(in.roster[i]);
  }
  in.logs = a_only;
  in.roster = roster;
  CHECK(error_of([&] { analyze(in); }) == ErrorKind::kEmptyGroup);
}

TEST_CASE("identical rater tallies give an all-zero diff") {
  AnalysisInput in = study_input();
  in.rater_a = read_tally_csv(testing::corpus_path("analytics/rater_a.csv"));
  in.rater_b = in.rater_a;
  AnalysisReport r = analyze(in);
  REQUIRE(r.rater_diff.has_value());
  for (const auto& c : r.rater_diff->cells) CHECK(c.delta == 0);
  CHECK(r.rater_diff->flips.empty());

  in.rater_b = read_tally_csv(testing::corpus_path("analytics/rater_b.csv"));
  AnalysisReport d = analyze(in);
  CHECK(d.rater_diff->flips.size() == 1);
}
