#include "blockdbg/core/validate.hpp"

#include <set>
#include <string_view>

namespace blockdbg {
namespace {

std::string join_messages(const std::vector<Diagnostic>& diagnostics) {
  std::string out;
  for (const auto& d : diagnostics) {
    if (d.severity != Severity::kError) continue;
    if (!out.empty()) out += "; ";
    out += to_string(d);
  }
  return out.empty() ? "program is invalid" : out;
}

class Validator {
 public:
  explicit Validator(const Program& program) : program_(program) {}

  std::vector<Diagnostic> run() {
    std::set<std::string> proc_names;
    for (const auto& proc : program_.procedures) {
      if (proc.name.empty()) error(proc.name, "procedure with empty name");
      if (!proc_names.insert(proc.name).second) {
        error(proc.name, "duplicate procedure '" + proc.name + "'");
      }
      std::set<std::string> seen;
      for (const auto& param : proc.params) {
        if (!seen.insert(param).second) {
          error(proc.name, "duplicate parameter '" + param + "' in procedure '" + proc.name + "'");
        }
      }
    }

    for (std::size_t i = 0; i < program_.scripts.size(); ++i) {
      const auto& script = program_.scripts[i];
      std::string where = "script " + std::to_string(i);
      if (script.trigger != "green_flag") {
        error(where, "unsupported trigger '" + script.trigger + "'");
      }
      if (script.body.empty()) warning(where, "script has an empty body");
      check_seq(script.body, nullptr);
    }
    for (const auto& proc : program_.procedures) check_seq(proc.body, &proc);
    return std::move(out_);
  }

 private:
  void error(const std::string& loc, std::string msg) {
    out_.push_back({Severity::kError, loc, std::move(msg)});
  }
  void warning(const std::string& loc, std::string msg) {
    out_.push_back({Severity::kWarning, loc, std::move(msg)});
  }

  static bool is_param(const ProcedureDef* scope, const std::string& name) {
    if (scope == nullptr) return false;
    for (const auto& p : scope->params) {
      if (p == name) return true;
    }
    return false;
  }

  void check_seq(const BlockSeq& seq, const ProcedureDef* scope) {
    for (const auto& block : seq) check_block(block, scope);
  }

  void check_block(const Block& block, const ProcedureDef* scope) {
    const std::string& loc = block.id;
    if (block.id.empty()) error(loc, "block with empty id");
    if (!ids_.insert(block.id).second) error(loc, "duplicate block id '" + block.id + "'");

    const OpcodeInfo& info = opcode_info(block.op);
    if (block.substacks.size() != info.substacks) {
      error(loc, std::string(info.name) + " expects " + std::to_string(info.substacks) +
                     " substack(s), found " + std::to_string(block.substacks.size()));
    }

    switch (info.target) {
      case TargetKind::kVariable:
        if (!program_.variables.count(block.target)) {
          error(loc, "unresolved variable '" + block.target + "'");
        }
        break;
      case TargetKind::kList:
        if (!program_.lists.count(block.target)) {
          error(loc, "unresolved list '" + block.target + "'");
        }
        break;
      case TargetKind::kProcedure: {
        const ProcedureDef* proc = program_.find_procedure(block.target);
        if (proc == nullptr) {
          error(loc, "call to undefined procedure '" + block.target + "'");
        } else if (proc->params.size() != block.inputs.size()) {
          error(loc, "call to '" + block.target + "' passes " +
                         std::to_string(block.inputs.size()) + " argument(s), expected " +
                         std::to_string(proc->params.size()));
        }
        break;
      }
      case TargetKind::kNone:
        break;
    }

    if (block.op != Opcode::kCall && block.inputs.size() != info.input_keys.size()) {
      error(loc, std::string(info.name) + " expects " + std::to_string(info.input_keys.size()) +
                     " input(s), found " + std::to_string(block.inputs.size()));
    }
    for (const auto& input : block.inputs) check_expr(input, loc, scope);
    for (const auto& sub : block.substacks) check_seq(sub, scope);
  }

  void check_expr(const Expr& expr, const std::string& loc, const ProcedureDef* scope) {
    std::size_t arity = expr_arity(expr.op);
    if (expr.args.size() != arity) {
      error(loc, "operator '" + std::string(expr_op_name(expr.op)) + "' expects " +
                     std::to_string(arity) + " operand(s), found " +
                     std::to_string(expr.args.size()));
    }
    switch (expr.op) {
      case ExprOp::kVar:
        if (!program_.variables.count(expr.name) && !is_param(scope, expr.name)) {
          error(loc, "unresolved variable '" + expr.name + "'");
        }
        break;
      case ExprOp::kParam:
        if (!is_param(scope, expr.name)) {
          error(loc, "unresolved parameter '" + expr.name + "'");
        }
        break;
      case ExprOp::kItem:
      case ExprOp::kListLength:
      case ExprOp::kListContains:
        if (!program_.lists.count(expr.name)) {
          error(loc, "unresolved list '" + expr.name + "'");
        }
        break;
      default:
        break;
    }
    for (const auto& arg : expr.args) check_expr(arg, loc, scope);
  }

  const Program& program_;
  std::set<std::string> ids_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::string to_string(const Diagnostic& d) {
  std::string sev = d.severity == Severity::kError ? "error" : "warning";
  return sev + " [" + d.location + "]: " + d.message;
}

std::vector<Diagnostic> validate(const Program& program) { return Validator(program).run(); }

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::kError) return true;
  }
  return false;
}

ValidationError::ValidationError(ErrorKind kind, std::vector<Diagnostic> diagnostics)
    : Error(kind, join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

}  // namespace blockdbg
