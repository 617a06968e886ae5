#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "blockdbg/core/program.hpp"

namespace blockdbg {

// Parses a `.blk.json` document and validates it. Throws Error{kSyntax} with
// a line:column position for malformed JSON or schema violations, and
// ValidationError{kValidation} when an invariant fails.
Program parse_program(std::string_view text);

// Reads and parses a program file.
Program load_program_file(const std::string& path);

// Canonical text form: two-space indented JSON with sorted object keys and
// a trailing newline. parse_program(serialize_program(p)) == p.
std::string serialize_program(const Program& program);

// Lowercase hex SHA-256 of serialize_program(program).
std::string program_hash(const Program& program);

// Structural conversions without validation. `path` prefixes schema errors.
Program program_from_json(const nlohmann::json& doc);
nlohmann::json program_to_json(const Program& program);

Block block_from_json(const nlohmann::json& doc, const std::string& path = "block");
nlohmann::json block_to_json(const Block& block);

Expr expr_from_json(const nlohmann::json& doc, const std::string& path = "expr");
nlohmann::json expr_to_json(const Expr& expr);

Value value_from_json(const nlohmann::json& doc, const std::string& path = "value");
nlohmann::json value_to_json(const Value& value);

}  // namespace blockdbg
