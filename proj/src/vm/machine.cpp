#include "blockdbg/vm/machine.hpp"

#include <cmath>

#include "blockdbg/core/error.hpp"
#include "blockdbg/core/validate.hpp"

namespace blockdbg {
namespace {

// UTF-8 aware helpers so `length` and `letter` count characters.
std::vector<std::string> utf8_chars(const std::string& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size();) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 1;
    n = std::min(n, s.size() - i);
    out.push_back(s.substr(i, n));
    i += n;
  }
  return out;
}

// 1-based list index; 0 when out of range.
std::size_t list_index(const Value& v, std::size_t length) {
  double idx = std::floor(v.to_number());
  if (!(idx >= 1) || idx > static_cast<double>(length)) return 0;
  return static_cast<std::size_t>(idx);
}

double scratch_mod(double n, double m) {
  double r = std::fmod(n, m);
  if (r / m < 0) r += m;
  return r;
}

const std::vector<Value>& list_of(const MachineState& state, const std::string& name) {
  auto it = state.lists.find(name);
  if (it == state.lists.end()) {
    throw Error(ErrorKind::kUnresolvedName, "unresolved list '" + name + "'");
  }
  return it->second;
}

void warn(std::vector<VmEvent>* sink, const BlockId& block, std::string text) {
  if (sink) sink->push_back({VmEvent::Kind::kRuntimeWarning, block, std::move(text)});
}

class Executor {
 public:
  Executor(MachineState& state, TickResult& result) : s_(state), r_(result) {}

  void run() {
    ThreadState& thread = s_.threads[s_.active_thread];
    r_.thread = s_.active_thread;
    Frame& frame = thread.stack.back();
    const Block& block = (*frame.seq)[frame.cursor];
    r_.executed = block.id;
    ++s_.tick_count;
    execute(thread, block);
    settle(thread);
    schedule();
  }

 private:
  Value eval(const Expr& e, const ThreadState& thread) {
    return evaluate_expr(e, s_, innermost_bindings(thread), &r_.events);
  }

  void push(ThreadState& thread, FrameKind kind, const BlockSeq& seq, std::optional<LoopState> loop,
            Bindings bindings = {}) {
    thread.stack.push_back(Frame{kind, &seq, 0, std::move(loop), std::move(bindings)});
  }

  void execute(ThreadState& thread, const Block& block) {
    // Most blocks advance the cursor before any frame is pushed, so a popped
    // child frame resumes the parent at the following block.
    auto advance = [&] { ++thread.stack.back().cursor; };
    switch (block.op) {
      case Opcode::kSetVar:
        s_.globals[block.target] = eval(block.inputs[0], thread);
        advance();
        break;
      case Opcode::kChangeVar: {
        double by = eval(block.inputs[0], thread).to_number();
        Value& v = s_.globals[block.target];
        v = Value(v.to_number() + by);
        advance();
        break;
      }
      case Opcode::kListAdd:
        s_.lists[block.target].push_back(eval(block.inputs[0], thread));
        advance();
        break;
      case Opcode::kListDelete: {
        auto& list = s_.lists[block.target];
        std::size_t idx = list_index(eval(block.inputs[0], thread), list.size());
        if (idx == 0) {
          warn(&r_.events, block.id, "delete from '" + block.target + "': index out of range");
        } else {
          list.erase(list.begin() + static_cast<std::ptrdiff_t>(idx - 1));
        }
        advance();
        break;
      }
      case Opcode::kListInsert: {
        Value index = eval(block.inputs[0], thread);
        Value item = eval(block.inputs[1], thread);
        auto& list = s_.lists[block.target];
        std::size_t idx = list_index(index, list.size() + 1);
        if (idx == 0) {
          warn(&r_.events, block.id, "insert into '" + block.target + "': index out of range");
        } else {
          list.insert(list.begin() + static_cast<std::ptrdiff_t>(idx - 1), std::move(item));
        }
        advance();
        break;
      }
      case Opcode::kListReplace: {
        Value index = eval(block.inputs[0], thread);
        Value item = eval(block.inputs[1], thread);
        auto& list = s_.lists[block.target];
        std::size_t idx = list_index(index, list.size());
        if (idx == 0) {
          warn(&r_.events, block.id, "replace in '" + block.target + "': index out of range");
        } else {
          list[idx - 1] = std::move(item);
        }
        advance();
        break;
      }
      case Opcode::kSay: {
        std::string text = eval(block.inputs[0], thread).to_string();
        s_.output.push_back(text);
        r_.events.push_back({VmEvent::Kind::kOutput, block.id, std::move(text)});
        advance();
        break;
      }
      case Opcode::kIf: {
        bool taken = eval(block.inputs[0], thread).to_bool();
        advance();
        if (taken && !block.substacks[0].empty()) {
          push(thread, FrameKind::kSubstack, block.substacks[0], std::nullopt);
        }
        break;
      }
      case Opcode::kIfElse: {
        const BlockSeq& branch =
            eval(block.inputs[0], thread).to_bool() ? block.substacks[0] : block.substacks[1];
        advance();
        if (!branch.empty()) push(thread, FrameKind::kSubstack, branch, std::nullopt);
        break;
      }
      case Opcode::kRepeat: {
        double times = std::floor(eval(block.inputs[0], thread).to_number() + 0.5);
        advance();
        if (times >= 1 && !block.substacks[0].empty()) {
          auto n = std::isinf(times) ? INT64_MAX : static_cast<std::int64_t>(times);
          push(thread, FrameKind::kSubstack, block.substacks[0],
               LoopState{LoopKind::kRepeat, n, &block});
        }
        break;
      }
      case Opcode::kRepeatUntil: {
        if (eval(block.inputs[0], thread).to_bool()) {
          advance();
        } else if (block.substacks[0].empty()) {
          // Busy wait: re-test the condition on the thread's next turn.
          r_.yielded = true;
        } else {
          advance();
          push(thread, FrameKind::kSubstack, block.substacks[0],
               LoopState{LoopKind::kRepeatUntil, 0, &block});
        }
        break;
      }
      case Opcode::kForever:
        if (block.substacks[0].empty()) {
          r_.yielded = true;
        } else {
          advance();
          push(thread, FrameKind::kSubstack, block.substacks[0],
               LoopState{LoopKind::kForever, 0, &block});
        }
        break;
      case Opcode::kCall: {
        const ProcedureDef* proc = s_.program->find_procedure(block.target);
        Bindings bindings;
        for (std::size_t i = 0; i < proc->params.size(); ++i) {
          bindings[proc->params[i]] = eval(block.inputs[i], thread);
        }
        advance();
        if (!proc->body.empty()) {
          push(thread, FrameKind::kProcedureCall, proc->body, std::nullopt, std::move(bindings));
        }
        break;
      }
      case Opcode::kStopScript:
        thread.stack.clear();
        break;
    }
  }

  // Pops completed frames and re-enters loops whose iteration finished.
  void settle(ThreadState& thread) {
    while (!thread.stack.empty()) {
      Frame& top = thread.stack.back();
      if (top.cursor < top.seq->size()) break;
      if (!top.loop) {
        thread.stack.pop_back();
        continue;
      }
      r_.yielded = true;
      LoopState& loop = *top.loop;
      bool again = true;
      switch (loop.kind) {
        case LoopKind::kRepeat:
          again = --loop.remaining > 0;
          break;
        case LoopKind::kRepeatUntil:
          again = !eval(loop.owner->inputs[0], thread).to_bool();
          break;
        case LoopKind::kForever:
          break;
      }
      if (!again) {
        thread.stack.pop_back();
        continue;
      }
      top.cursor = 0;
      break;
    }
    if (thread.stack.empty()) thread.status = ThreadStatus::kDone;
  }

  // Round-robin: the active thread keeps the processor until it yields or
  // finishes, then the next runnable thread in script order takes over.
  void schedule() {
    const ThreadState& current = s_.threads[s_.active_thread];
    if (current.status == ThreadStatus::kDone) r_.yielded = true;
    if (!r_.yielded) return;
    std::size_t n = s_.threads.size();
    for (std::size_t step = 1; step <= n; ++step) {
      std::size_t candidate = (s_.active_thread + step) % n;
      if (s_.threads[candidate].status == ThreadStatus::kRunnable) {
        s_.active_thread = candidate;
        return;
      }
    }
  }

  MachineState& s_;
  TickResult& r_;
};

}  // namespace

bool MachineState::runnable() const {
  for (const auto& t : threads) {
    if (t.status == ThreadStatus::kRunnable) return true;
  }
  return false;
}

MachineState load(std::shared_ptr<const Program> program) {
  auto diagnostics = validate(*program);
  if (has_errors(diagnostics)) {
    throw ValidationError(ErrorKind::kInvalidProgram, std::move(diagnostics));
  }
  MachineState state;
  state.globals = program->variables;
  state.lists = program->lists;
  for (std::size_t i = 0; i < program->scripts.size(); ++i) {
    ThreadState thread;
    thread.script_index = i;
    const BlockSeq& body = program->scripts[i].body;
    if (body.empty()) {
      thread.status = ThreadStatus::kDone;
    } else {
      thread.stack.push_back(Frame{FrameKind::kScriptRoot, &body, 0, std::nullopt, {}});
    }
    state.threads.push_back(std::move(thread));
  }
  for (std::size_t i = 0; i < state.threads.size(); ++i) {
    if (state.threads[i].status == ThreadStatus::kRunnable) {
      state.active_thread = i;
      break;
    }
  }
  state.program = std::move(program);
  return state;
}

MachineState load(const Program& program) { return load(std::make_shared<const Program>(program)); }

const Bindings* innermost_bindings(const ThreadState& thread) {
  for (auto it = thread.stack.rbegin(); it != thread.stack.rend(); ++it) {
    if (it->kind == FrameKind::kProcedureCall) return &it->bindings;
  }
  return nullptr;
}

Value evaluate_expr(const Expr& e, const MachineState& s, const Bindings* bindings,
                    std::vector<VmEvent>* warnings) {
  auto arg = [&](std::size_t i) { return evaluate_expr(e.args.at(i), s, bindings, warnings); };
  auto num = [&](std::size_t i) { return arg(i).to_number(); };
  switch (e.op) {
    case ExprOp::kLiteral:
      return e.literal;
    case ExprOp::kVar: {
      if (bindings) {
        if (auto it = bindings->find(e.name); it != bindings->end()) return it->second;
      }
      if (auto it = s.globals.find(e.name); it != s.globals.end()) return it->second;
      throw Error(ErrorKind::kUnresolvedName, "unresolved variable '" + e.name + "'");
    }
    case ExprOp::kParam: {
      if (bindings) {
        if (auto it = bindings->find(e.name); it != bindings->end()) return it->second;
      }
      throw Error(ErrorKind::kUnresolvedName, "unresolved parameter '" + e.name + "'");
    }
    case ExprOp::kItem: {
      const auto& list = list_of(s, e.name);
      Value index = arg(0);
      std::size_t idx = list_index(index, list.size());
      if (idx == 0) {
        warn(warnings, {}, "item " + index.to_string() + " of '" + e.name + "': index out of range");
        return Value(std::string());
      }
      return list[idx - 1];
    }
    case ExprOp::kListLength:
      return Value(static_cast<double>(list_of(s, e.name).size()));
    case ExprOp::kListContains: {
      const auto& list = list_of(s, e.name);
      Value needle = arg(0);
      for (const auto& item : list) {
        if (compare_values(item, needle) == 0) return Value(true);
      }
      return Value(false);
    }
    case ExprOp::kStringLength:
      return Value(static_cast<double>(utf8_chars(arg(0).to_string()).size()));
    case ExprOp::kLetterOf: {
      Value index = arg(0);
      auto chars = utf8_chars(arg(1).to_string());
      std::size_t idx = list_index(index, chars.size());
      return idx == 0 ? Value(std::string()) : Value(chars[idx - 1]);
    }
    case ExprOp::kJoin:
      return Value(arg(0).to_string() + arg(1).to_string());
    case ExprOp::kAdd: return Value(num(0) + num(1));
    case ExprOp::kSub: return Value(num(0) - num(1));
    case ExprOp::kMul: return Value(num(0) * num(1));
    case ExprOp::kDiv: return Value(num(0) / num(1));
    case ExprOp::kMod: return Value(scratch_mod(num(0), num(1)));
    case ExprOp::kRound: return Value(std::floor(num(0) + 0.5));
    case ExprOp::kLt: return Value(compare_values(arg(0), arg(1)) < 0);
    case ExprOp::kGt: return Value(compare_values(arg(0), arg(1)) > 0);
    case ExprOp::kEq: return Value(compare_values(arg(0), arg(1)) == 0);
    case ExprOp::kAnd: {
      bool a = arg(0).to_bool();
      bool b = arg(1).to_bool();
      return Value(a && b);
    }
    case ExprOp::kOr: {
      bool a = arg(0).to_bool();
      bool b = arg(1).to_bool();
      return Value(a || b);
    }
    case ExprOp::kNot:
      return Value(!arg(0).to_bool());
  }
  return Value();
}

const Block* next_block_ptr(const MachineState& state) {
  if (state.active_thread >= state.threads.size()) return nullptr;
  const ThreadState& thread = state.threads[state.active_thread];
  if (thread.status != ThreadStatus::kRunnable || thread.stack.empty()) return nullptr;
  const Frame& top = thread.stack.back();
  return &(*top.seq)[top.cursor];
}

std::optional<BlockId> next_block(const MachineState& state) {
  if (const Block* b = next_block_ptr(state)) return b->id;
  return std::nullopt;
}

TickResult tick(MachineState& state) {
  if (next_block_ptr(state) == nullptr) {
    throw Error(ErrorKind::kNothingRunnable, "no runnable thread");
  }
  TickResult result;
  Executor(state, result).run();
  for (auto& ev : result.events) {
    if (ev.block.empty()) ev.block = result.executed;
  }
  return result;
}

RunResult run_to_completion(MachineState state, std::uint64_t fuel) {
  RunResult result;
  std::uint64_t used = 0;
  while (state.runnable() && used < fuel) {
    TickResult t = tick(state);
    ++used;
    for (auto& ev : t.events) result.events.push_back(std::move(ev));
  }
  result.termination = state.runnable() ? Termination::kFuelExhausted : Termination::kCompleted;
  result.final_state = std::move(state);
  return result;
}

}  // namespace blockdbg
