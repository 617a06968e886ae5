#include "study.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "blockdbg/core/error.hpp"
#include "blockdbg/debug/session.hpp"
#include "fixtures.hpp"

namespace blockdbg::testing {
namespace {

// Which functions subject `i` (0-based; 0..9 group A) uses.
struct Plan {
  bool breakpoint, cont, step_over, step_in, step_out, watch;
};

Plan plan_for(int i) {
  if (i < 10) return {true, false, i < 7, true, i < 3, i < 9};
  const int j = i - 10;
  return {j < 8, j < 6, j < 4, j < 5, j == 0, j < 2};
}

SessionLog run_subject(int i, const std::shared_ptr<const Program>& program) {
  char id[8];
  std::snprintf(id, sizeof id, "S%02d", i + 1);
  SessionConfig config;
  config.session_id = std::string(id) + "-1";
  config.subject_id = id;
  config.group = i < 10 ? Group::kA : Group::kB;
  config.wall_clock_start = "2026-01-01T00:00:00Z";
  std::int64_t now = 0;
  MemoryLogSink sink;
  DebugSession s(program, config, sink, [&now] { return now += 250; });

  const Plan p = plan_for(i);
  auto paused = [&] { return s.status() == SessionStatus::kPaused; };
  if (p.breakpoint) s.set_breakpoint("b4");
  if (p.watch) {
    s.add_watch("item i of nums");
    s.eval_watches();
  }
  if (p.step_over && paused()) s.step_over();
  if (p.step_in) {
    for (int k = 0; k < 4 && paused() && s.paused_location()->stack_depth < 2; ++k) s.step_in();
  }
  if (p.step_out && paused()) s.step_out();
  if (p.cont && paused()) s.continue_();
  if (p.watch && paused()) s.eval_watches();

  // Fix the start index, then run a little of the fixed program.
  Edit fix;
  fix.kind = EditKind::kReplaceBlock;
  fix.target = "b2";
  Block b2 = block_at(s.program(), "b2");
  b2.inputs[0] = Expr::lit(Value(1));
  fix.block = b2;
  s.apply_edit(fix);
  if (p.cont && paused()) {
    s.clear_breakpoint("b4");
    s.continue_();
  } else if (p.step_over && paused()) {
    s.step_over();
  }
  s.end_session();
  return SessionLog{sink.events(), std::string(id) + ".dbglog.jsonl"};
}

}  // namespace

Study synthetic_study() {
  auto program = std::make_shared<const Program>(load_corpus_program("index_bug"));
  Study study;
  for (int i = 0; i < 20; ++i) {
    study.logs.push_back(run_subject(i, program));
    study.roster.push_back({study.logs.back().events.front().subject_id, i < 10 ? Group::kA : Group::kB});
  }
  return study;
}

std::vector<std::pair<int, int>> synthetic_study_usage() {
  std::vector<std::pair<int, int>> out(6);
  for (int i = 0; i < 20; ++i) {
    const Plan p = plan_for(i);
    const bool used[6] = {p.breakpoint, p.cont, p.step_over, p.step_in, p.step_out, p.watch};
    for (int f = 0; f < 6; ++f) {
      if (!used[f]) continue;
      (i < 10 ? out[f].first : out[f].second) += 1;
    }
  }
  return out;
}

SessionLog scripted_sum_list_log() {
  SessionConfig config;
  config.session_id = "scripted-1";
  config.subject_id = "P00";
  config.wall_clock_start = "2026-01-01T00:00:00Z";
  std::int64_t now = 0;
  MemoryLogSink sink;
  DebugSession s(std::make_shared<const Program>(load_corpus_program("sum_list")), config, sink, [&now] { return now += 100; });
  s.set_breakpoint("b4");
  s.set_breakpoint("b6");
  s.continue_();
  s.add_watch("sum");
  s.eval_watches();
  s.step_over();
  s.inspect_variables();
  s.end_session();
  return SessionLog{sink.events(), "scripted_sum_list.dbglog.jsonl"};
}

std::string tally_csv(const std::vector<analytics::UsageTally>& tallies) {
  std::string out = "subject_id,group";
  for (auto f : analytics::kAllFunctions) out += "," + std::string(analytics::function_name(f));
  out += "\n";
  for (const auto& t : tallies) {
    out += t.subject_id + "," + std::string(group_name(t.group));
    for (auto f : analytics::kAllFunctions) out += "," + std::to_string(t[f]);
    out += "\n";
  }
  return out;
}

void write_study(const Study& study, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "logs");
  for (const auto& log : study.logs) {
    write_log((fs::path(dir) / "logs" / log.source_path).string(), log.events);
  }
  std::ofstream roster(fs::path(dir) / "roster.csv", std::ios::trunc);
  roster << "subject_id,group\n";
  for (const auto& r : study.roster) roster << r.subject_id << ',' << group_name(r.group) << "\n";
}

}  // namespace blockdbg::testing
