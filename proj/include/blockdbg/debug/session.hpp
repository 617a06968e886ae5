#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blockdbg/core/edit.hpp"
#include "blockdbg/core/program.hpp"
#include "blockdbg/log/session_log.hpp"
#include "blockdbg/vm/machine.hpp"

namespace blockdbg {

enum class PauseReason { kBreakpoint, kStep, kEntryPause };
std::string_view pause_reason_name(PauseReason reason);
std::optional<PauseReason> pause_reason_from_name(std::string_view name);

// Where execution is stopped. `block` has not executed yet.
struct PauseInfo {
  std::size_t thread = 0;
  BlockId block;
  PauseReason reason = PauseReason::kEntryPause;
  std::size_t stack_depth = 0;

  friend bool operator==(const PauseInfo&, const PauseInfo&) = default;
};

nlohmann::json pause_to_json(const PauseInfo& pause);
PauseInfo pause_from_json(const nlohmann::json& doc);

enum class SessionStatus { kPaused, kRunning, kTerminated };
std::string_view status_name(SessionStatus status);

struct Breakpoint {
  BlockId block;
  bool enabled = true;
};

struct WatchExpression {
  int id = 0;
  std::string source_text;
  Expr parsed;
};

struct WatchResult {
  int id = 0;
  std::string source_text;
  std::optional<Value> value;  // empty: unresolved
  std::string note;            // why the watch is unresolved
};

struct ListEntry {
  std::size_t index = 0;  // 1-based, as displayed to the learner
  Value value;
};

struct VariableSnapshot {
  std::map<std::string, Value> globals;
  std::map<std::string, std::vector<ListEntry>> lists;
  Bindings bindings;  // innermost procedure parameters of the paused thread
};

nlohmann::json watch_results_to_json(const std::vector<WatchResult>& results);
nlohmann::json snapshot_to_json(const VariableSnapshot& snapshot);

struct SessionConfig {
  std::string session_id;  // generated when empty
  std::string subject_id;
  Group group = Group::kUnspecified;
  bool pause_on_entry = true;
  std::uint64_t fuel = kDefaultFuel;  // tick budget per resume command
  std::vector<BlockId> breakpoints;   // placed before execution starts
  std::string wall_clock_start;       // ISO 8601; now when empty
};

// Receives engine notifications. All callbacks run on the engine's thread.
class SessionObserver {
 public:
  virtual ~SessionObserver() = default;
  virtual void on_log(const LogEvent&) {}
  virtual void on_stopped(const PauseInfo&) {}
  virtual void on_continued() {}
  virtual void on_output(const VmEvent&) {}
  virtual void on_terminated() {}
  virtual void on_tick(const TickResult&) {}
};

// Commands submitted from other threads; the engine runs them between ticks.
class CommandQueue {
 public:
  void post(std::function<void()> command);
  // Runs every queued command on the calling thread; returns how many ran.
  std::size_t drain();
  // Blocks until a command is available or close() was called; runs it.
  // Returns false once closed and empty.
  bool run_one();
  void close();

 private:
  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<std::function<void()>> commands_;
  bool closed_ = false;
};

// Milliseconds since the session started.
using SessionClock = std::function<std::int64_t()>;
SessionClock steady_session_clock();

// The debugger proper. Every public operation logs exactly one event of its
// own kind, including rejected attempts, before returning or throwing.
class DebugSession {
 public:
  // start_session: loads the program and pauses at entry (or runs until a
  // breakpoint when pause_on_entry is false). Throws ValidationError
  // {kInvalidProgram}.
  DebugSession(std::shared_ptr<const Program> program, SessionConfig config, LogSink& sink,
               SessionClock clock = steady_session_clock(), SessionObserver* observer = nullptr);

  DebugSession(const DebugSession&) = delete;
  DebugSession& operator=(const DebugSession&) = delete;

  void set_observer(SessionObserver* observer) { observer_ = observer; }
  void set_command_queue(CommandQueue* queue) { queue_ = queue; }

  // Throws Error{kUnknownBlockId}. Re-setting an existing breakpoint is a
  // no-op that still logs.
  void set_breakpoint(const BlockId& id);
  // Throws Error{kUnknownBlockId} when no breakpoint exists on `id`.
  void clear_breakpoint(const BlockId& id);

  // Throw Error{kNotPaused}; step_out also Error{kAtTopFrame}.
  void continue_();
  void step_over();
  void step_in();
  void step_out();

  // Returns the new watch id. Throws Error{kExpressionParse}.
  int add_watch(const std::string& text);
  // Throws Error{kUnknownWatchId}.
  void remove_watch(int id);
  std::vector<WatchResult> eval_watches();
  VariableSnapshot inspect_variables();

  std::optional<PauseInfo> paused_location() const { return pause_; }

  // Edits are accepted while paused or terminated; the machine restarts
  // from the edited program's initial state. Throws Error{kNotPaused},
  // Error{kNotFound} or ValidationError{kRejectedEdit}.
  void apply_edit(const Edit& edit);
  // Replaces the program and restarts. Throws ValidationError{kInvalidProgram}.
  void load_program(std::shared_ptr<const Program> program);
  // Restarts the current program from its initial state.
  void restart();

  // Stops a running resume at the next tick boundary (reason step).
  void interrupt() { interrupt_requested_ = true; }

  // Logs session_end once; later calls are no-ops. While running, the
  // machine pauses at the next tick boundary first.
  void end_session();

  SessionStatus status() const { return status_; }
  const MachineState& machine() const { return machine_; }
  const Program& program() const { return *program_; }
  std::shared_ptr<const Program> program_ptr() const { return program_; }
  const std::map<BlockId, Breakpoint>& breakpoints() const { return breakpoints_; }
  const std::vector<WatchExpression>& watches() const { return watches_; }
  const SessionConfig& config() const { return config_; }
  bool ended() const { return ended_; }

 private:
  using StopRule = std::function<bool(const MachineState&, std::uint64_t ticks)>;

  void log(EventKind kind, nlohmann::json payload = nlohmann::json::object());
  void require_paused(EventKind kind, nlohmann::json payload);
  void reload(nlohmann::json load_payload, EventKind kind);
  void enter();
  void run(const StopRule& rule, bool suppress_current);
  void run_loop(const StopRule& rule, bool suppress_current);
  void pause(PauseReason reason);
  void finish_run();
  bool breakpoint_enabled(const BlockId& id) const;

  std::shared_ptr<const Program> program_;
  SessionConfig config_;
  LogSink& sink_;
  SessionClock clock_;
  SessionObserver* observer_ = nullptr;
  CommandQueue* queue_ = nullptr;

  MachineState machine_;
  std::map<BlockId, Breakpoint> breakpoints_;
  std::vector<WatchExpression> watches_;
  int next_watch_id_ = 1;
  SessionStatus status_ = SessionStatus::kPaused;
  std::optional<PauseInfo> pause_;
  bool fresh_run_ = true;
  bool interrupt_requested_ = false;
  bool ended_ = false;
  bool end_pending_ = false;
  std::int64_t last_timestamp_ = 0;
};

}  // namespace blockdbg
