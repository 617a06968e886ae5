#include "blockdbg/log/replay.hpp"

#include "blockdbg/core/error.hpp"
#include "blockdbg/core/program_io.hpp"
#include "blockdbg/debug/session.hpp"

namespace blockdbg {
namespace {

using nlohmann::json;

bool observable(EventKind kind) {
  return kind == EventKind::kBreakpointHit || kind == EventKind::kPause ||
         kind == EventKind::kOutput;
}

std::string field(const json& payload, const char* key) {
  auto it = payload.find(key);
  if (it == payload.end()) return "";
  return it->is_string() ? it->get<std::string>() : it->dump();
}

// Identity of an observable event with timestamps stripped.
std::string signature(const LogEvent& e) {
  std::string sig(event_kind_name(e.kind));
  sig += " block=" + field(e.payload, "block");
  if (e.kind == EventKind::kPause) sig += " reason=" + field(e.payload, "reason");
  if (e.kind == EventKind::kOutput) sig += " text=" + field(e.payload, "text");
  return sig;
}

SessionConfig config_from(const LogEvent& start) {
  SessionConfig config;
  config.session_id = start.session_id;
  config.subject_id = start.subject_id;
  config.group = start.group;
  config.pause_on_entry = start.payload.value("pause_on_entry", true);
  config.fuel = start.payload.value("fuel", kDefaultFuel);
  if (auto it = start.payload.find("breakpoints"); it != start.payload.end() && it->is_array()) {
    for (const auto& b : *it) config.breakpoints.push_back(b.get<std::string>());
  }
  return config;
}

void drive(DebugSession& session, const LogEvent& e) {
  const json& p = e.payload;
  switch (e.kind) {
    case EventKind::kProgramLoad: {
      std::string reason = p.value("reason", "");
      if (reason == "restart") {
        session.restart();
      } else if (reason == "load" && p.contains("program")) {
        session.load_program(std::make_shared<const Program>(program_from_json(p["program"])));
      }
      break;
    }
    case EventKind::kProgramEdit:
      session.apply_edit(edit_from_json(p.at("edit")));
      if (p.value("ok", false) && p.value("hash", "") != program_hash(session.program())) {
        throw Error(ErrorKind::kHashMismatch, "edited program hash differs from the logged hash");
      }
      break;
    case EventKind::kBreakpointSet:
      if (p.value("source", "") != "launch") session.set_breakpoint(p.at("block").get<std::string>());
      break;
    case EventKind::kBreakpointClear:
      session.clear_breakpoint(p.at("block").get<std::string>());
      break;
    case EventKind::kContinue: session.continue_(); break;
    case EventKind::kStepIn: session.step_in(); break;
    case EventKind::kStepOver: session.step_over(); break;
    case EventKind::kStepOut: session.step_out(); break;
    case EventKind::kWatchAdd: session.add_watch(p.at("text").get<std::string>()); break;
    case EventKind::kWatchRemove: session.remove_watch(p.at("id").get<int>()); break;
    case EventKind::kWatchEval: session.eval_watches(); break;
    case EventKind::kVariableInspect: session.inspect_variables(); break;
    case EventKind::kSessionEnd: session.end_session(); break;
    default: break;
  }
}

}  // namespace

std::string ReplayReport::describe() const {
  if (reproduced) return "reproduced " + std::to_string(compared) + " observable event(s)";
  if (!divergence) return "not reproduced";
  return "divergence at log event " + std::to_string(divergence->log_index) + ": expected [" +
         divergence->expected + "], replay produced [" + divergence->actual + "]";
}

ReplayReport replay(const SessionLog& log, const Program& program) {
  if (log.events.empty() || log.events.front().kind != EventKind::kSessionStart) {
    throw Error(ErrorKind::kMalformedLine, "log does not begin with session_start");
  }
  const LogEvent* first_load = nullptr;
  for (const auto& e : log.events) {
    if (e.kind == EventKind::kProgramLoad) {
      first_load = &e;
      break;
    }
  }
  std::string hash = program_hash(program);
  if (first_load == nullptr || first_load->payload.value("hash", "") != hash) {
    throw Error(ErrorKind::kHashMismatch,
                "log was recorded against a different program (hash " +
                    (first_load ? first_load->payload.value("hash", "?") : std::string("?")) +
                    ", given " + hash + ")");
  }

  MemoryLogSink sink;
  DebugSession session(std::make_shared<const Program>(program), config_from(log.events.front()),
                       sink, [] { return std::int64_t{0}; });
  bool past_launch = false;
  for (const auto& e : log.events) {
    if (e.kind == EventKind::kSessionStart) continue;
    if (!past_launch && e.kind == EventKind::kProgramLoad) {
      past_launch = true;
      continue;
    }
    try {
      drive(session, e);
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::kHashMismatch) throw;
      // Rejected commands are logged by the replayed session as well.
    }
  }

  std::vector<std::size_t> expected_idx;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    if (observable(log.events[i].kind)) expected_idx.push_back(i);
  }
  std::vector<const LogEvent*> actual;
  for (const auto& e : sink.events()) {
    if (observable(e.kind)) actual.push_back(&e);
  }

  ReplayReport report;
  std::size_t n = std::max(expected_idx.size(), actual.size());
  for (std::size_t k = 0; k < n; ++k) {
    std::string want = k < expected_idx.size() ? signature(log.events[expected_idx[k]]) : "<none>";
    std::string got = k < actual.size() ? signature(*actual[k]) : "<none>";
    if (want != got) {
      std::size_t at = k < expected_idx.size() ? expected_idx[k] : log.events.size();
      report.divergence = ReplayDivergence{at, want, got};
      report.compared = k;
      return report;
    }
  }
  report.compared = n;
  report.reproduced = true;
  return report;
}

}  // namespace blockdbg
