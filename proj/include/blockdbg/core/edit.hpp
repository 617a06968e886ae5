#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "blockdbg/core/program.hpp"

namespace blockdbg {

enum class EditKind { kReplaceBlock, kInsertBlock, kDeleteBlock, kSetInitialValue };

enum class InsertPosition { kAfter, kBefore };

// A program edit. `target` is a block id for the block edits and a variable
// or list name for kSetInitialValue.
struct Edit {
  EditKind kind = EditKind::kReplaceBlock;
  std::string target;
  std::optional<Block> block;                   // replace/insert payload
  InsertPosition position = InsertPosition::kAfter;
  std::optional<Value> value;                   // new initial value of a variable
  std::optional<std::vector<Value>> list_items; // new initial contents of a list

  friend bool operator==(const Edit&, const Edit&) = default;
};

// Pure transformation: returns the edited program, leaving `program`
// untouched. Throws Error{kNotFound} for a missing target and
// ValidationError{kRejectedEdit} when the result would not validate.
Program apply_edit(const Program& program, const Edit& edit);

// One-line human summary, e.g. "replace_block b2".
std::string describe(const Edit& edit);

Edit edit_from_json(const nlohmann::json& doc);
nlohmann::json edit_to_json(const Edit& edit);

}  // namespace blockdbg
