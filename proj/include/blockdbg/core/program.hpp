#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockdbg/core/value.hpp"

namespace blockdbg {

using BlockId = std::string;

enum class ExprOp {
  kLiteral,
  kVar,
  kParam,
  kItem,          // item <args[0]> of list <name>
  kListLength,    // length of list <name>
  kListContains,  // list <name> contains <args[0]>
  kStringLength,
  kLetterOf,      // letter <args[0]> of <args[1]>
  kJoin,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMod,
  kRound,
  kLt,
  kGt,
  kEq,
  kAnd,
  kOr,
  kNot,
};

// Reporter expression tree. Children are owned by value, so trees are
// finite and acyclic by construction.
struct Expr {
  ExprOp op = ExprOp::kLiteral;
  Value literal;
  std::string name;  // variable, parameter or list name where the op needs one
  std::vector<Expr> args;

  static Expr lit(Value v) { return Expr{ExprOp::kLiteral, std::move(v), {}, {}}; }
  static Expr var(std::string n) { return Expr{ExprOp::kVar, {}, std::move(n), {}}; }
  static Expr param(std::string n) { return Expr{ExprOp::kParam, {}, std::move(n), {}}; }
  static Expr binary(ExprOp op, Expr a, Expr b) { return Expr{op, {}, {}, {std::move(a), std::move(b)}}; }

  friend bool operator==(const Expr&, const Expr&) = default;
};

std::string_view expr_op_name(ExprOp op);
std::optional<ExprOp> expr_op_from_name(std::string_view name);
// Expected child count for an op; literal/var/param/list_length take none.
std::size_t expr_arity(ExprOp op);
// Whether the op carries a name (variable, parameter or list).
bool expr_op_has_name(ExprOp op);

enum class Opcode {
  kSetVar,
  kChangeVar,
  kListAdd,
  kListDelete,
  kListInsert,
  kListReplace,
  kSay,
  kIf,
  kIfElse,
  kRepeat,
  kRepeatUntil,
  kForever,
  kCall,
  kStopScript,
};

// Which name slot a block carries.
enum class TargetKind { kNone, kVariable, kList, kProcedure };

struct OpcodeInfo {
  Opcode op;
  std::string_view name;
  TargetKind target;
  std::string_view target_key;
  std::vector<std::string_view> input_keys;  // empty for call (positional "args")
  std::size_t substacks;
};

const OpcodeInfo& opcode_info(Opcode op);
std::optional<Opcode> opcode_from_name(std::string_view name);

// A statement block. `inputs` are ordered per opcode_info(op).input_keys,
// except for call where they are the positional argument expressions.
struct Block {
  BlockId id;
  Opcode op = Opcode::kSay;
  std::string target;
  std::vector<Expr> inputs;
  std::vector<std::vector<Block>> substacks;

  friend bool operator==(const Block&, const Block&) = default;
};

using BlockSeq = std::vector<Block>;

struct ProcedureDef {
  std::string name;
  std::vector<std::string> params;
  BlockSeq body;

  friend bool operator==(const ProcedureDef&, const ProcedureDef&) = default;
};

struct Script {
  std::string trigger = "green_flag";
  BlockSeq body;

  friend bool operator==(const Script&, const Script&) = default;
};

struct Program {
  std::map<std::string, Value> variables;
  std::map<std::string, std::vector<Value>> lists;
  std::vector<ProcedureDef> procedures;
  std::vector<Script> scripts;

  const ProcedureDef* find_procedure(std::string_view name) const;

  friend bool operator==(const Program&, const Program&) = default;
};

// Returns the unique block with this id anywhere in the program (scripts
// and procedure bodies). Throws Error{kNotFound}.
const Block& block_at(const Program& program, std::string_view id);

// Visits every block in program order: scripts first, then procedures,
// depth-first with substacks before following siblings.
template <typename Fn>
void for_each_block(const BlockSeq& seq, Fn&& fn) {
  for (const auto& block : seq) {
    fn(block);
    for (const auto& sub : block.substacks) for_each_block(sub, fn);
  }
}

template <typename Fn>
void for_each_block(const Program& program, Fn&& fn) {
  for (const auto& script : program.scripts) for_each_block(script.body, fn);
  for (const auto& proc : program.procedures) for_each_block(proc.body, fn);
}

}  // namespace blockdbg
