#include "blockdbg/debug/session.hpp"

#include <chrono>
#include <ctime>
#include <random>

#include "blockdbg/core/error.hpp"
#include "blockdbg/core/expr_parser.hpp"
#include "blockdbg/core/program_io.hpp"
#include "blockdbg/core/validate.hpp"

namespace blockdbg {
namespace {

using nlohmann::json;

std::string random_session_id() {
  std::random_device rd;
  std::mt19937_64 gen((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id;
  for (int i = 0; i < 16; ++i) id.push_back(kHex[gen() & 0xf]);
  return id;
}

std::string wall_clock_iso8601() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json failure(json payload, const std::exception& e) {
  payload["ok"] = false;
  payload["error"] = e.what();
  return payload;
}

}  // namespace

std::string_view pause_reason_name(PauseReason reason) {
  switch (reason) {
    case PauseReason::kBreakpoint: return "breakpoint";
    case PauseReason::kStep: return "step";
    case PauseReason::kEntryPause: return "entry_pause";
  }
  return "step";
}

std::optional<PauseReason> pause_reason_from_name(std::string_view name) {
  if (name == "breakpoint") return PauseReason::kBreakpoint;
  if (name == "step") return PauseReason::kStep;
  if (name == "entry_pause") return PauseReason::kEntryPause;
  return std::nullopt;
}

std::string_view status_name(SessionStatus status) {
  switch (status) {
    case SessionStatus::kPaused: return "paused";
    case SessionStatus::kRunning: return "running";
    case SessionStatus::kTerminated: return "terminated";
  }
  return "terminated";
}

json pause_to_json(const PauseInfo& p) {
  return json{{"thread", p.thread},
              {"block", p.block},
              {"reason", std::string(pause_reason_name(p.reason))},
              {"stack_depth", p.stack_depth}};
}

PauseInfo pause_from_json(const json& doc) {
  PauseInfo p;
  p.thread = doc.at("thread").get<std::size_t>();
  p.block = doc.at("block").get<std::string>();
  auto reason = pause_reason_from_name(doc.at("reason").get<std::string>());
  if (!reason) throw Error(ErrorKind::kMalformedEnvelope, "unknown pause reason");
  p.reason = *reason;
  p.stack_depth = doc.at("stack_depth").get<std::size_t>();
  return p;
}

json watch_results_to_json(const std::vector<WatchResult>& results) {
  json out = json::array();
  for (const auto& r : results) {
    json row = {{"id", r.id}, {"expression", r.source_text}};
    if (r.value) {
      row["value"] = value_to_json(*r.value);
    } else {
      row["unresolved"] = true;
      row["note"] = r.note;
    }
    out.push_back(std::move(row));
  }
  return out;
}

json snapshot_to_json(const VariableSnapshot& s) {
  json globals = json::object();
  for (const auto& [name, v] : s.globals) globals[name] = value_to_json(v);
  json lists = json::object();
  for (const auto& [name, entries] : s.lists) {
    json arr = json::array();
    for (const auto& e : entries) arr.push_back({{"index", e.index}, {"value", value_to_json(e.value)}});
    lists[name] = std::move(arr);
  }
  json bindings = json::object();
  for (const auto& [name, v] : s.bindings) bindings[name] = value_to_json(v);
  return json{{"globals", globals}, {"lists", lists}, {"bindings", bindings}};
}

void CommandQueue::post(std::function<void()> command) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    commands_.push_back(std::move(command));
  }
  ready_.notify_one();
}

std::size_t CommandQueue::drain() {
  std::size_t ran = 0;
  for (;;) {
    std::function<void()> command;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (commands_.empty()) return ran;
      command = std::move(commands_.front());
      commands_.pop_front();
    }
    command();
    ++ran;
  }
}

bool CommandQueue::run_one() {
  std::function<void()> command;
  {
    std::unique_lock<std::mutex> lock(mutex_);
    ready_.wait(lock, [&] { return closed_ || !commands_.empty(); });
    if (commands_.empty()) return false;
    command = std::move(commands_.front());
    commands_.pop_front();
  }
  command();
  return true;
}

void CommandQueue::close() {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    closed_ = true;
  }
  ready_.notify_all();
}

SessionClock steady_session_clock() {
  auto start = std::chrono::steady_clock::now();
  return [start] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
  };
}

DebugSession::DebugSession(std::shared_ptr<const Program> program, SessionConfig config,
                           LogSink& sink, SessionClock clock, SessionObserver* observer)
    : program_(std::move(program)),
      config_(std::move(config)),
      sink_(sink),
      clock_(std::move(clock)),
      observer_(observer),
      machine_(load(program_)) {
  if (config_.session_id.empty()) config_.session_id = random_session_id();
  if (config_.wall_clock_start.empty()) config_.wall_clock_start = wall_clock_iso8601();
  log(EventKind::kSessionStart, {{"pause_on_entry", config_.pause_on_entry},
                                 {"fuel", config_.fuel},
                                 {"breakpoints", config_.breakpoints},
                                 {"wall_clock_start", config_.wall_clock_start}});
  log(EventKind::kProgramLoad, {{"hash", program_hash(*program_)}, {"reason", "launch"}});
  for (const auto& id : config_.breakpoints) {
    json payload = {{"block", id}, {"source", "launch"}};
    try {
      block_at(*program_, id);
      breakpoints_[id] = Breakpoint{id, true};
      payload["ok"] = true;
      log(EventKind::kBreakpointSet, payload);
    } catch (const Error& e) {
      log(EventKind::kBreakpointSet, failure(payload, e));
    }
  }
  enter();
}

void DebugSession::log(EventKind kind, json payload) {
  std::int64_t now = std::max(clock_(), last_timestamp_);
  last_timestamp_ = now;
  LogEvent event{now, config_.session_id, config_.subject_id, config_.group, kind, std::move(payload)};
  sink_.append(event);
  if (observer_) observer_->on_log(event);
}

void DebugSession::require_paused(EventKind kind, json payload) {
  if (status_ != SessionStatus::kPaused) {
    Error err(ErrorKind::kNotPaused, "not paused");
    log(kind, failure(std::move(payload), err));
    throw err;
  }
}

bool DebugSession::breakpoint_enabled(const BlockId& id) const {
  auto it = breakpoints_.find(id);
  return it != breakpoints_.end() && it->second.enabled;
}

void DebugSession::enter() {
  fresh_run_ = true;
  pause_.reset();
  if (!machine_.runnable()) {
    status_ = SessionStatus::kTerminated;
    if (observer_) observer_->on_terminated();
    return;
  }
  const Block* first = next_block_ptr(machine_);
  if (config_.pause_on_entry || breakpoint_enabled(first->id)) {
    pause(PauseReason::kEntryPause);
  } else {
    run(nullptr, false);
  }
}

void DebugSession::pause(PauseReason reason) {
  const ThreadState& thread = machine_.threads[machine_.active_thread];
  pause_ = PauseInfo{machine_.active_thread, next_block_ptr(machine_)->id, reason, thread.depth()};
  status_ = SessionStatus::kPaused;
  log(EventKind::kPause, pause_to_json(*pause_));
  if (observer_) observer_->on_stopped(*pause_);
}

void DebugSession::finish_run() {
  status_ = SessionStatus::kTerminated;
  pause_.reset();
  log(EventKind::kRunEnd, {{"termination", "completed"}, {"tick_count", machine_.tick_count}});
  if (observer_) observer_->on_terminated();
}

void DebugSession::run(const StopRule& rule, bool suppress_current) {
  run_loop(rule, suppress_current);
  if (end_pending_) {
    end_pending_ = false;
    end_session();
  }
}

void DebugSession::run_loop(const StopRule& rule, bool suppress_current) {
  if (fresh_run_) {
    log(EventKind::kRunStart, {{"hash", program_hash(*program_)}});
    fresh_run_ = false;
  }
  status_ = SessionStatus::kRunning;
  pause_.reset();
  interrupt_requested_ = false;
  log(EventKind::kResume);
  if (observer_) observer_->on_continued();

  std::uint64_t ticks = 0;
  for (;;) {
    if (!machine_.runnable()) {
      finish_run();
      return;
    }
    // The paused block runs first so its own breakpoint cannot re-trigger.
    if (ticks > 0 || !suppress_current) {
      if (queue_) queue_->drain();
      const Block* next = next_block_ptr(machine_);
      if (breakpoint_enabled(next->id)) {
        log(EventKind::kBreakpointHit, {{"block", next->id}, {"thread", machine_.active_thread}});
        pause(PauseReason::kBreakpoint);
        return;
      }
      if (ticks > 0 && rule && rule(machine_, ticks)) {
        pause(PauseReason::kStep);
        return;
      }
      if (interrupt_requested_ || ticks >= config_.fuel) {
        interrupt_requested_ = false;
        pause(PauseReason::kStep);
        return;
      }
    }
    TickResult result = tick(machine_);
    ++ticks;
    for (const auto& ev : result.events) {
      const char* category = ev.kind == VmEvent::Kind::kOutput ? "say" : "warning";
      log(EventKind::kOutput, {{"block", ev.block}, {"text", ev.text}, {"category", category}});
      if (observer_) observer_->on_output(ev);
    }
    if (observer_) observer_->on_tick(result);
  }
}

void DebugSession::set_breakpoint(const BlockId& id) {
  json payload = {{"block", id}};
  try {
    block_at(*program_, id);
  } catch (const Error& e) {
    Error err(ErrorKind::kUnknownBlockId, "unknown block id '" + id + "'");
    log(EventKind::kBreakpointSet, failure(payload, err));
    throw err;
  }
  payload["ok"] = true;
  payload["already_set"] = breakpoints_.count(id) > 0;
  breakpoints_[id] = Breakpoint{id, true};
  log(EventKind::kBreakpointSet, payload);
}

void DebugSession::clear_breakpoint(const BlockId& id) {
  json payload = {{"block", id}};
  if (breakpoints_.erase(id) == 0) {
    Error err(ErrorKind::kUnknownBlockId, "no breakpoint on '" + id + "'");
    log(EventKind::kBreakpointClear, failure(payload, err));
    throw err;
  }
  payload["ok"] = true;
  log(EventKind::kBreakpointClear, payload);
}

void DebugSession::continue_() {
  require_paused(EventKind::kContinue, json::object());
  log(EventKind::kContinue, {{"ok", true}});
  run(nullptr, true);
}

void DebugSession::step_over() {
  require_paused(EventKind::kStepOver, json::object());
  log(EventKind::kStepOver, {{"ok", true}, {"from", pause_->block}});
  const std::size_t thread = pause_->thread;
  const std::size_t depth = pause_->stack_depth;
  run(
      [thread, depth](const MachineState& m, std::uint64_t) {
        const ThreadState& t = m.threads[thread];
        if (t.status == ThreadStatus::kDone) return true;
        return m.active_thread == thread && t.depth() <= depth;
      },
      true);
}

void DebugSession::step_in() {
  require_paused(EventKind::kStepIn, json::object());
  log(EventKind::kStepIn, {{"ok", true}, {"from", pause_->block}});
  const std::size_t thread = pause_->thread;
  const std::size_t depth = pause_->stack_depth;
  run(
      [thread, depth](const MachineState& m, std::uint64_t ticks) {
        const ThreadState& t = m.threads[thread];
        if (t.status == ThreadStatus::kDone) return true;
        if (m.active_thread != thread) return false;
        // Entered a substack or procedure body on the first tick.
        if (ticks == 1 && t.depth() > depth) return true;
        return t.depth() <= depth;
      },
      true);
}

void DebugSession::step_out() {
  require_paused(EventKind::kStepOut, json::object());
  if (pause_->stack_depth <= 1) {
    Error err(ErrorKind::kAtTopFrame, "already at the top frame");
    log(EventKind::kStepOut, failure(json{{"from", pause_->block}}, err));
    throw err;
  }
  log(EventKind::kStepOut, {{"ok", true}, {"from", pause_->block}});
  const std::size_t thread = pause_->thread;
  const std::size_t depth = pause_->stack_depth;
  run(
      [thread, depth](const MachineState& m, std::uint64_t) {
        const ThreadState& t = m.threads[thread];
        if (t.status == ThreadStatus::kDone) return true;
        return m.active_thread == thread && t.depth() < depth;
      },
      true);
}

int DebugSession::add_watch(const std::string& text) {
  json payload = {{"text", text}};
  Expr parsed;
  try {
    parsed = parse_expression(text);
  } catch (const Error& e) {
    log(EventKind::kWatchAdd, failure(payload, e));
    throw;
  }
  int id = next_watch_id_++;
  watches_.push_back(WatchExpression{id, text, std::move(parsed)});
  payload["id"] = id;
  payload["ok"] = true;
  log(EventKind::kWatchAdd, payload);
  return id;
}

void DebugSession::remove_watch(int id) {
  json payload = {{"id", id}};
  for (auto it = watches_.begin(); it != watches_.end(); ++it) {
    if (it->id == id) {
      payload["text"] = it->source_text;
      payload["ok"] = true;
      watches_.erase(it);
      log(EventKind::kWatchRemove, payload);
      return;
    }
  }
  Error err(ErrorKind::kUnknownWatchId, "unknown watch id " + std::to_string(id));
  log(EventKind::kWatchRemove, failure(payload, err));
  throw err;
}

std::vector<WatchResult> DebugSession::eval_watches() {
  require_paused(EventKind::kWatchEval, json::object());
  const Bindings* bindings = innermost_bindings(machine_.threads[pause_->thread]);
  std::vector<WatchResult> results;
  for (const auto& w : watches_) {
    WatchResult r{w.id, w.source_text, std::nullopt, {}};
    try {
      r.value = evaluate_expr(w.parsed, machine_, bindings, nullptr);
    } catch (const Error& e) {
      r.note = e.what();
    }
    results.push_back(std::move(r));
  }
  log(EventKind::kWatchEval, {{"ok", true}, {"results", watch_results_to_json(results)}});
  return results;
}

VariableSnapshot DebugSession::inspect_variables() {
  require_paused(EventKind::kVariableInspect, json::object());
  VariableSnapshot snap;
  snap.globals = machine_.globals;
  for (const auto& [name, items] : machine_.lists) {
    auto& entries = snap.lists[name];
    for (std::size_t i = 0; i < items.size(); ++i) entries.push_back({i + 1, items[i]});
  }
  if (const Bindings* b = innermost_bindings(machine_.threads[pause_->thread])) snap.bindings = *b;
  log(EventKind::kVariableInspect, {{"ok", true}, {"snapshot", snapshot_to_json(snap)}});
  return snap;
}

void DebugSession::reload(json load_payload, EventKind kind) {
  machine_ = load(program_);
  for (auto it = breakpoints_.begin(); it != breakpoints_.end();) {
    bool resolves = true;
    try {
      block_at(*program_, it->first);
    } catch (const Error&) {
      resolves = false;
    }
    it = resolves ? std::next(it) : breakpoints_.erase(it);
  }
  log(kind, std::move(load_payload));
  enter();
}

void DebugSession::apply_edit(const Edit& edit) {
  json payload = {{"edit", edit_to_json(edit)}, {"summary", describe(edit)}};
  if (status_ == SessionStatus::kRunning) {
    Error err(ErrorKind::kNotPaused, "edits are only accepted while paused or terminated");
    log(EventKind::kProgramEdit, failure(payload, err));
    throw err;
  }
  Program edited;
  try {
    edited = blockdbg::apply_edit(*program_, edit);
  } catch (const Error& e) {
    log(EventKind::kProgramEdit, failure(payload, e));
    throw;
  }
  program_ = std::make_shared<const Program>(std::move(edited));
  payload["ok"] = true;
  payload["hash"] = program_hash(*program_);
  reload(std::move(payload), EventKind::kProgramEdit);
}

void DebugSession::load_program(std::shared_ptr<const Program> program) {
  json payload = {{"reason", "load"}};
  if (status_ == SessionStatus::kRunning) {
    Error err(ErrorKind::kNotPaused, "cannot load a program while running");
    log(EventKind::kProgramLoad, failure(payload, err));
    throw err;
  }
  auto diagnostics = validate(*program);
  if (has_errors(diagnostics)) {
    ValidationError err(ErrorKind::kInvalidProgram, std::move(diagnostics));
    log(EventKind::kProgramLoad, failure(payload, err));
    throw err;
  }
  program_ = std::move(program);
  payload["ok"] = true;
  payload["hash"] = program_hash(*program_);
  payload["program"] = program_to_json(*program_);
  reload(std::move(payload), EventKind::kProgramLoad);
}

void DebugSession::restart() {
  if (status_ == SessionStatus::kRunning) {
    throw Error(ErrorKind::kNotPaused, "cannot restart while running");
  }
  reload({{"ok", true}, {"hash", program_hash(*program_)}, {"reason", "restart"}},
         EventKind::kProgramLoad);
}

void DebugSession::end_session() {
  if (ended_) return;
  // Mid-run (a queued command): stop at the next boundary, then end.
  if (status_ == SessionStatus::kRunning) {
    end_pending_ = true;
    interrupt_requested_ = true;
    return;
  }
  ended_ = true;
  log(EventKind::kSessionEnd, {{"status", std::string(status_name(status_))}});
}

}  // namespace blockdbg
