#include "blockdbg/core/program.hpp"

#include <array>

#include "blockdbg/core/error.hpp"

namespace blockdbg {
namespace {

struct ExprOpEntry {
  ExprOp op;
  std::string_view name;
  std::size_t arity;
  bool has_name;
};

constexpr std::array<ExprOpEntry, 21> kExprOps = {{
    {ExprOp::kLiteral, "literal", 0, false},
    {ExprOp::kVar, "var", 0, true},
    {ExprOp::kParam, "param", 0, true},
    {ExprOp::kItem, "item", 1, true},
    {ExprOp::kListLength, "list_length", 0, true},
    {ExprOp::kListContains, "list_contains", 1, true},
    {ExprOp::kStringLength, "string_length", 1, false},
    {ExprOp::kLetterOf, "letter_of", 2, false},
    {ExprOp::kJoin, "join", 2, false},
    {ExprOp::kAdd, "add", 2, false},
    {ExprOp::kSub, "sub", 2, false},
    {ExprOp::kMul, "mul", 2, false},
    {ExprOp::kDiv, "div", 2, false},
    {ExprOp::kMod, "mod", 2, false},
    {ExprOp::kRound, "round", 1, false},
    {ExprOp::kLt, "lt", 2, false},
    {ExprOp::kGt, "gt", 2, false},
    {ExprOp::kEq, "eq", 2, false},
    {ExprOp::kAnd, "and", 2, false},
    {ExprOp::kOr, "or", 2, false},
    {ExprOp::kNot, "not", 1, false},
}};

const ExprOpEntry& entry(ExprOp op) {
  for (const auto& e : kExprOps) {
    if (e.op == op) return e;
  }
  return kExprOps[0];
}

const std::vector<OpcodeInfo>& opcode_table() {
  static const std::vector<OpcodeInfo> table = {
      {Opcode::kSetVar, "set_var", TargetKind::kVariable, "var", {"value"}, 0},
      {Opcode::kChangeVar, "change_var", TargetKind::kVariable, "var", {"by"}, 0},
      {Opcode::kListAdd, "list_add", TargetKind::kList, "list", {"item"}, 0},
      {Opcode::kListDelete, "list_delete", TargetKind::kList, "list", {"index"}, 0},
      {Opcode::kListInsert, "list_insert", TargetKind::kList, "list", {"index", "item"}, 0},
      {Opcode::kListReplace, "list_replace", TargetKind::kList, "list", {"index", "item"}, 0},
      {Opcode::kSay, "say", TargetKind::kNone, "", {"message"}, 0},
      {Opcode::kIf, "if", TargetKind::kNone, "", {"condition"}, 1},
      {Opcode::kIfElse, "if_else", TargetKind::kNone, "", {"condition"}, 2},
      {Opcode::kRepeat, "repeat", TargetKind::kNone, "", {"times"}, 1},
      {Opcode::kRepeatUntil, "repeat_until", TargetKind::kNone, "", {"condition"}, 1},
      {Opcode::kForever, "forever", TargetKind::kNone, "", {}, 1},
      {Opcode::kCall, "call", TargetKind::kProcedure, "proc", {}, 0},
      {Opcode::kStopScript, "stop_script", TargetKind::kNone, "", {}, 0},
  };
  return table;
}

const Block* find_in(const BlockSeq& seq, std::string_view id) {
  for (const auto& block : seq) {
    if (block.id == id) return &block;
    for (const auto& sub : block.substacks) {
      if (const Block* found = find_in(sub, id)) return found;
    }
  }
  return nullptr;
}

}  // namespace

std::string_view expr_op_name(ExprOp op) { return entry(op).name; }

std::optional<ExprOp> expr_op_from_name(std::string_view name) {
  for (const auto& e : kExprOps) {
    if (e.name == name && e.op != ExprOp::kLiteral) return e.op;
  }
  return std::nullopt;
}

std::size_t expr_arity(ExprOp op) { return entry(op).arity; }
bool expr_op_has_name(ExprOp op) { return entry(op).has_name; }

const OpcodeInfo& opcode_info(Opcode op) {
  return opcode_table()[static_cast<std::size_t>(op)];
}

std::optional<Opcode> opcode_from_name(std::string_view name) {
  for (const auto& info : opcode_table()) {
    if (info.name == name) return info.op;
  }
  return std::nullopt;
}

const ProcedureDef* Program::find_procedure(std::string_view name) const {
  for (const auto& proc : procedures) {
    if (proc.name == name) return &proc;
  }
  return nullptr;
}

const Block& block_at(const Program& program, std::string_view id) {
  for (const auto& script : program.scripts) {
    if (const Block* b = find_in(script.body, id)) return *b;
  }
  for (const auto& proc : program.procedures) {
    if (const Block* b = find_in(proc.body, id)) return *b;
  }
  throw Error(ErrorKind::kNotFound, "no block with id '" + std::string(id) + "'");
}

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSyntax: return "syntax";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kNotFound: return "not-found";
    case ErrorKind::kRejectedEdit: return "rejected-edit";
    case ErrorKind::kInvalidProgram: return "invalid-program";
    case ErrorKind::kUnresolvedName: return "unresolved-name";
    case ErrorKind::kNothingRunnable: return "nothing-runnable";
    case ErrorKind::kNotPaused: return "not-paused";
    case ErrorKind::kAtTopFrame: return "at-top-frame";
    case ErrorKind::kUnknownBlockId: return "unknown-block-id";
    case ErrorKind::kUnknownWatchId: return "unknown-watch-id";
    case ErrorKind::kExpressionParse: return "parse-error";
    case ErrorKind::kOutOfOrderTimestamp: return "out-of-order-timestamp";
    case ErrorKind::kStorage: return "storage";
    case ErrorKind::kMalformedLine: return "malformed-line";
    case ErrorKind::kHashMismatch: return "hash-mismatch";
    case ErrorKind::kMalformedEnvelope: return "malformed-envelope";
    case ErrorKind::kUnknownCommand: return "unknown-command";
    case ErrorKind::kDegenerateMargin: return "degenerate-margin";
    case ErrorKind::kEmptyGroup: return "empty-group";
    case ErrorKind::kSubjectSetMismatch: return "subject-set-mismatch";
    case ErrorKind::kRosterMismatch: return "roster-mismatch";
    case ErrorKind::kPortInUse: return "port-in-use";
  }
  return "unknown";
}

}  // namespace blockdbg
