#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "blockdbg/core/program.hpp"

namespace blockdbg {

using Bindings = std::map<std::string, Value>;

enum class FrameKind { kScriptRoot, kSubstack, kProcedureCall };

enum class LoopKind { kRepeat, kRepeatUntil, kForever };

struct LoopState {
  LoopKind kind = LoopKind::kRepeat;
  std::int64_t remaining = 0;      // kRepeat only
  const Block* owner = nullptr;    // the C-block that entered this loop

  friend bool operator==(const LoopState&, const LoopState&) = default;
};

// One activation on a thread's stack. `seq` points into the machine's
// immutable program; cursor == seq->size() means the frame is complete.
struct Frame {
  FrameKind kind = FrameKind::kScriptRoot;
  const BlockSeq* seq = nullptr;
  std::size_t cursor = 0;
  std::optional<LoopState> loop;
  Bindings bindings;  // procedure_call frames only

  friend bool operator==(const Frame&, const Frame&) = default;
};

enum class ThreadStatus { kRunnable, kDone };

struct ThreadState {
  std::size_t script_index = 0;
  std::vector<Frame> stack;  // bottom is the script root
  ThreadStatus status = ThreadStatus::kRunnable;

  std::size_t depth() const { return stack.size(); }

  friend bool operator==(const ThreadState&, const ThreadState&) = default;
};

// Complete interpreter state. Copyable; the program is shared and immutable.
struct MachineState {
  std::shared_ptr<const Program> program;
  std::map<std::string, Value> globals;
  std::map<std::string, std::vector<Value>> lists;
  std::vector<ThreadState> threads;
  std::size_t active_thread = 0;
  std::vector<std::string> output;
  std::uint64_t tick_count = 0;

  bool runnable() const;

  // Equality of everything but program identity (frames compare by pointer
  // into the program, so compare states derived from the same program).
  friend bool operator==(const MachineState& a, const MachineState& b) {
    return a.globals == b.globals && a.lists == b.lists && a.threads == b.threads &&
           a.active_thread == b.active_thread && a.output == b.output &&
           a.tick_count == b.tick_count;
  }
};

struct VmEvent {
  enum class Kind { kOutput, kRuntimeWarning };
  Kind kind = Kind::kOutput;
  BlockId block;
  std::string text;

  friend bool operator==(const VmEvent&, const VmEvent&) = default;
};

struct TickResult {
  BlockId executed;
  std::size_t thread = 0;
  bool yielded = false;  // the thread gave up the processor after this block
  std::vector<VmEvent> events;
};

enum class Termination { kCompleted, kFuelExhausted };

struct RunResult {
  MachineState final_state;
  Termination termination = Termination::kCompleted;
  std::vector<VmEvent> events;
};

inline constexpr std::uint64_t kDefaultFuel = 100000;

// Fresh machine: initial globals and lists, one runnable thread per script.
// Throws ValidationError{kInvalidProgram} when the program has errors.
MachineState load(std::shared_ptr<const Program> program);
MachineState load(const Program& program);

// Evaluates a reporter against the machine. `bindings` are the innermost
// procedure parameters (may be null). Pure; out-of-range list reads append
// a runtime warning to `warnings` when given. Throws Error{kUnresolvedName}.
Value evaluate_expr(const Expr& expr, const MachineState& state, const Bindings* bindings,
                    std::vector<VmEvent>* warnings = nullptr);

// Parameters visible to the top of the thread's stack, or null outside any
// procedure call.
const Bindings* innermost_bindings(const ThreadState& thread);

// The block the active thread executes on the next tick, if any.
const Block* next_block_ptr(const MachineState& state);
std::optional<BlockId> next_block(const MachineState& state);

// Executes exactly one statement block of the active thread. Throws
// Error{kNothingRunnable} when every thread is done.
TickResult tick(MachineState& state);

// Ticks until every thread is done or `fuel` ticks have run.
RunResult run_to_completion(MachineState state, std::uint64_t fuel = kDefaultFuel);

}  // namespace blockdbg
