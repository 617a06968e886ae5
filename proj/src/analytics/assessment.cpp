#include "blockdbg/analytics/assessment.hpp"

#include <map>

#include "blockdbg/core/error.hpp"

namespace blockdbg::analytics {
namespace {

bool shows_intent(EventKind kind) {
  return kind == EventKind::kWatchEval || kind == EventKind::kVariableInspect ||
         kind == EventKind::kStepIn || kind == EventKind::kStepOver || kind == EventKind::kStepOut;
}

std::map<std::string, const UsageTally*> index_by_subject(const std::vector<UsageTally>& tallies) {
  std::map<std::string, const UsageTally*> out;
  for (const auto& t : tallies) out[t.subject_id] = &t;
  return out;
}

}  // namespace

ProcedureAssessment assess_procedure(const SessionLog& log, const AssessmentRules& rules) {
  ProcedureAssessment out;
  const auto& events = log.events;
  if (!events.empty()) {
    out.subject_id = events.front().subject_id;
    out.session_id = events.front().session_id;
  }

  for (std::size_t i = 0; i < events.size(); ++i) {
    const EventKind kind = events[i].kind;
    if (kind == EventKind::kBreakpointSet) {
      out.step3_breakpoint_inserted = true;
      out.step3_evidence.push_back(i);
    } else if (kind == EventKind::kBreakpointHit) {
      for (std::size_t j = i + 1; j < events.size(); ++j) {
        if (rules.inspection_window && j - i > *rules.inspection_window) break;
        EventKind next = events[j].kind;
        if (next == EventKind::kContinue || next == EventKind::kRunEnd) break;
        if (shows_intent(next)) {
          out.step4_intention = true;
          out.step4_evidence.push_back(i);
          out.step4_evidence.push_back(j);
          break;
        }
      }
    } else if (kind == EventKind::kProgramEdit && events[i].payload.value("ok", true)) {
      for (std::size_t j = i + 1; j < events.size(); ++j) {
        if (events[j].kind == EventKind::kRunStart) {
          out.step5_bug_fixed = true;
          out.step5_evidence.push_back(i);
          out.step5_evidence.push_back(j);
          break;
        }
      }
    }
  }
  return out;
}

RaterDiff compare_raters(const std::vector<UsageTally>& rater_a,
                         const std::vector<UsageTally>& rater_b) {
  auto a = index_by_subject(rater_a);
  auto b = index_by_subject(rater_b);
  if (a.size() != rater_a.size() || b.size() != rater_b.size()) {
    throw Error(ErrorKind::kSubjectSetMismatch, "a rater lists the same subject twice");
  }
  for (const auto& [subject, _] : a) {
    if (!b.count(subject)) {
      throw Error(ErrorKind::kSubjectSetMismatch, "subject '" + subject + "' missing from rater B");
    }
  }
  for (const auto& [subject, _] : b) {
    if (!a.count(subject)) {
      throw Error(ErrorKind::kSubjectSetMismatch, "subject '" + subject + "' missing from rater A");
    }
  }

  RaterDiff diff;
  for (const auto& [subject, ta] : a) {
    const UsageTally* tb = b.at(subject);
    for (DebuggerFunction f : kAllFunctions) {
      int ca = (*ta)[f];
      int cb = (*tb)[f];
      diff.cells.push_back({subject, f, ca, cb, ca - cb});
      if ((ca >= 1) != (cb >= 1)) diff.flips.emplace_back(subject, f);
    }
  }
  return diff;
}

}  // namespace blockdbg::analytics
