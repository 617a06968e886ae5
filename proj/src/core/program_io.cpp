#include "blockdbg/core/program_io.hpp"

#include <fstream>
#include <sstream>

#include "blockdbg/core/digest.hpp"
#include "blockdbg/core/error.hpp"
#include "blockdbg/core/validate.hpp"

namespace blockdbg {
namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::kSyntax, "at " + path + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) schema_error(path + "." + key, "expected a string");
  return v.get<std::string>();
}

// Converts a byte offset into a 1-based line:column pair.
std::string position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

BlockSeq seq_from_json(const json& doc, const std::string& path) {
  if (!doc.is_array()) schema_error(path, "expected an array of blocks");
  BlockSeq seq;
  seq.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    seq.push_back(block_from_json(doc[i], path + "[" + std::to_string(i) + "]"));
  }
  return seq;
}

json seq_to_json(const BlockSeq& seq) {
  json out = json::array();
  for (const auto& block : seq) out.push_back(block_to_json(block));
  return out;
}

}  // namespace

Value value_from_json(const json& doc, const std::string& path) {
  if (doc.is_boolean()) return Value(doc.get<bool>());
  if (doc.is_number()) return Value(doc.get<double>());
  if (doc.is_string()) return Value(doc.get<std::string>());
  schema_error(path, "expected a number, string or boolean");
}

json value_to_json(const Value& value) {
  if (value.is_bool()) return value.as_bool_unchecked();
  if (value.is_number()) return value.as_number_unchecked();
  return value.as_text_unchecked();
}

Expr expr_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) return Expr::lit(value_from_json(doc, path));
  std::string op_name = require_string(doc, "op", path);
  auto op = expr_op_from_name(op_name);
  if (!op) schema_error(path, "unknown expression op '" + op_name + "'");
  Expr expr;
  expr.op = *op;
  if (expr_op_has_name(*op)) expr.name = require_string(doc, "name", path);
  if (auto it = doc.find("args"); it != doc.end()) {
    if (!it->is_array()) schema_error(path + ".args", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      expr.args.push_back(expr_from_json((*it)[i], path + ".args[" + std::to_string(i) + "]"));
    }
  }
  return expr;
}

json expr_to_json(const Expr& expr) {
  if (expr.op == ExprOp::kLiteral) return value_to_json(expr.literal);
  json out = json::object();
  out["op"] = std::string(expr_op_name(expr.op));
  if (expr_op_has_name(expr.op)) out["name"] = expr.name;
  json args = json::array();
  for (const auto& arg : expr.args) args.push_back(expr_to_json(arg));
  out["args"] = std::move(args);
  return out;
}

Block block_from_json(const json& doc, const std::string& path) {
  if (!doc.is_object()) schema_error(path, "expected a block object");
  Block block;
  block.id = require_string(doc, "id", path);
  std::string op_name = require_string(doc, "op", path);
  auto op = opcode_from_name(op_name);
  if (!op) schema_error(path, "unknown opcode '" + op_name + "'");
  block.op = *op;
  const OpcodeInfo& info = opcode_info(block.op);

  json args = json::object();
  if (auto it = doc.find("args"); it != doc.end()) {
    if (!it->is_object()) schema_error(path + ".args", "expected an object");
    args = *it;
  }
  const std::string args_path = path + ".args";
  if (info.target != TargetKind::kNone) {
    block.target = require_string(args, std::string(info.target_key).c_str(), args_path);
  }
  if (block.op == Opcode::kCall) {
    if (auto it = args.find("args"); it != args.end()) {
      if (!it->is_array()) schema_error(args_path + ".args", "expected an array");
      for (std::size_t i = 0; i < it->size(); ++i) {
        block.inputs.push_back(
            expr_from_json((*it)[i], args_path + ".args[" + std::to_string(i) + "]"));
      }
    }
  } else {
    for (std::string_view key : info.input_keys) {
      std::string k(key);
      block.inputs.push_back(expr_from_json(require(args, k.c_str(), args_path), args_path + "." + k));
    }
  }

  if (auto it = doc.find("substacks"); it != doc.end()) {
    if (!it->is_array()) schema_error(path + ".substacks", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      block.substacks.push_back(
          seq_from_json((*it)[i], path + ".substacks[" + std::to_string(i) + "]"));
    }
  }
  return block;
}

json block_to_json(const Block& block) {
  const OpcodeInfo& info = opcode_info(block.op);
  json args = json::object();
  if (info.target != TargetKind::kNone) args[std::string(info.target_key)] = block.target;
  if (block.op == Opcode::kCall) {
    json list = json::array();
    for (const auto& e : block.inputs) list.push_back(expr_to_json(e));
    args["args"] = std::move(list);
  } else {
    for (std::size_t i = 0; i < info.input_keys.size() && i < block.inputs.size(); ++i) {
      args[std::string(info.input_keys[i])] = expr_to_json(block.inputs[i]);
    }
  }
  json out = json::object();
  out["id"] = block.id;
  out["op"] = std::string(info.name);
  out["args"] = std::move(args);
  json subs = json::array();
  for (const auto& sub : block.substacks) subs.push_back(seq_to_json(sub));
  out["substacks"] = std::move(subs);
  return out;
}

Program program_from_json(const json& doc) {
  if (!doc.is_object()) schema_error("$", "expected a program object");
  Program program;
  if (auto it = doc.find("variables"); it != doc.end()) {
    if (!it->is_object()) schema_error("variables", "expected an object");
    for (const auto& [name, v] : it->items()) {
      program.variables.emplace(name, value_from_json(v, "variables." + name));
    }
  }
  if (auto it = doc.find("lists"); it != doc.end()) {
    if (!it->is_object()) schema_error("lists", "expected an object");
    for (const auto& [name, arr] : it->items()) {
      if (!arr.is_array()) schema_error("lists." + name, "expected an array");
      std::vector<Value> items;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        items.push_back(value_from_json(arr[i], "lists." + name + "[" + std::to_string(i) + "]"));
      }
      program.lists.emplace(name, std::move(items));
    }
  }
  if (auto it = doc.find("procedures"); it != doc.end()) {
    if (!it->is_array()) schema_error("procedures", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& p = (*it)[i];
      std::string path = "procedures[" + std::to_string(i) + "]";
      if (!p.is_object()) schema_error(path, "expected an object");
      ProcedureDef proc;
      proc.name = require_string(p, "name", path);
      if (auto pit = p.find("params"); pit != p.end()) {
        if (!pit->is_array()) schema_error(path + ".params", "expected an array");
        for (const auto& param : *pit) {
          if (!param.is_string()) schema_error(path + ".params", "expected strings");
          proc.params.push_back(param.get<std::string>());
        }
      }
      proc.body = seq_from_json(require(p, "body", path), path + ".body");
      program.procedures.push_back(std::move(proc));
    }
  }
  if (auto it = doc.find("scripts"); it != doc.end()) {
    if (!it->is_array()) schema_error("scripts", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& s = (*it)[i];
      std::string path = "scripts[" + std::to_string(i) + "]";
      if (!s.is_object()) schema_error(path, "expected an object");
      Script script;
      script.trigger = require_string(s, "trigger", path);
      script.body = seq_from_json(require(s, "body", path), path + ".body");
      program.scripts.push_back(std::move(script));
    }
  }
  return program;
}

json program_to_json(const Program& program) {
  json out = json::object();
  json vars = json::object();
  for (const auto& [name, v] : program.variables) vars[name] = value_to_json(v);
  json lists = json::object();
  for (const auto& [name, items] : program.lists) {
    json arr = json::array();
    for (const auto& v : items) arr.push_back(value_to_json(v));
    lists[name] = std::move(arr);
  }
  json procs = json::array();
  for (const auto& proc : program.procedures) {
    procs.push_back({{"name", proc.name}, {"params", proc.params}, {"body", seq_to_json(proc.body)}});
  }
  json scripts = json::array();
  for (const auto& script : program.scripts) {
    scripts.push_back({{"trigger", script.trigger}, {"body", seq_to_json(script.body)}});
  }
  out["variables"] = std::move(vars);
  out["lists"] = std::move(lists);
  out["procedures"] = std::move(procs);
  out["scripts"] = std::move(scripts);
  return out;
}

Program parse_program(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kSyntax,
                "syntax error at " + position_of(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                    e.what());
  }
  Program program = program_from_json(doc);
  auto diagnostics = validate(program);
  if (has_errors(diagnostics)) throw ValidationError(ErrorKind::kValidation, std::move(diagnostics));
  return program;
}

Program load_program_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kStorage, "cannot open program file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str());
}

std::string serialize_program(const Program& program) {
  return program_to_json(program).dump(2) + "\n";
}

std::string program_hash(const Program& program) { return sha256_hex(serialize_program(program)); }

}  // namespace blockdbg
