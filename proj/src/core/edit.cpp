#include "blockdbg/core/edit.hpp"

#include "blockdbg/core/error.hpp"
#include "blockdbg/core/program_io.hpp"
#include "blockdbg/core/validate.hpp"

namespace blockdbg {
namespace {

using nlohmann::json;

constexpr std::string_view kEditNames[] = {"replace_block", "insert_block", "delete_block",
                                           "set_initial_value"};

// Locates the sequence holding `id` and the block's index in it.
bool locate(BlockSeq& seq, const std::string& id, BlockSeq*& owner, std::size_t& index) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i].id == id) {
      owner = &seq;
      index = i;
      return true;
    }
    for (auto& sub : seq[i].substacks) {
      if (locate(sub, id, owner, index)) return true;
    }
  }
  return false;
}

bool locate(Program& program, const std::string& id, BlockSeq*& owner, std::size_t& index) {
  for (auto& script : program.scripts) {
    if (locate(script.body, id, owner, index)) return true;
  }
  for (auto& proc : program.procedures) {
    if (locate(proc.body, id, owner, index)) return true;
  }
  return false;
}

const Block& require_block(const Edit& edit) {
  if (!edit.block) {
    throw Error(ErrorKind::kRejectedEdit, describe(edit) + ": missing block payload");
  }
  return *edit.block;
}

}  // namespace

Program apply_edit(const Program& program, const Edit& edit) {
  Program out = program;
  if (edit.kind == EditKind::kSetInitialValue) {
    if (auto it = out.variables.find(edit.target); it != out.variables.end()) {
      if (!edit.value) throw Error(ErrorKind::kRejectedEdit, describe(edit) + ": missing value");
      it->second = *edit.value;
    } else if (auto lt = out.lists.find(edit.target); lt != out.lists.end()) {
      if (!edit.list_items) {
        throw Error(ErrorKind::kRejectedEdit, describe(edit) + ": missing list items");
      }
      lt->second = *edit.list_items;
    } else {
      throw Error(ErrorKind::kNotFound, "no variable or list named '" + edit.target + "'");
    }
  } else {
    BlockSeq* owner = nullptr;
    std::size_t index = 0;
    if (!locate(out, edit.target, owner, index)) {
      throw Error(ErrorKind::kNotFound, "no block with id '" + edit.target + "'");
    }
    switch (edit.kind) {
      case EditKind::kReplaceBlock:
        (*owner)[index] = require_block(edit);
        break;
      case EditKind::kInsertBlock: {
        std::size_t at = edit.position == InsertPosition::kAfter ? index + 1 : index;
        owner->insert(owner->begin() + static_cast<std::ptrdiff_t>(at), require_block(edit));
        break;
      }
      case EditKind::kDeleteBlock:
        owner->erase(owner->begin() + static_cast<std::ptrdiff_t>(index));
        break;
      case EditKind::kSetInitialValue:
        break;
    }
  }

  auto diagnostics = validate(out);
  if (has_errors(diagnostics)) {
    throw ValidationError(ErrorKind::kRejectedEdit, std::move(diagnostics));
  }
  return out;
}

std::string describe(const Edit& edit) {
  return std::string(kEditNames[static_cast<int>(edit.kind)]) + " " + edit.target;
}

Edit edit_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::kSyntax, "edit: expected an object");
  Edit edit;
  std::string kind = doc.value("kind", "");
  bool known = false;
  for (int i = 0; i < 4; ++i) {
    if (kEditNames[i] == kind) {
      edit.kind = static_cast<EditKind>(i);
      known = true;
    }
  }
  if (!known) throw Error(ErrorKind::kSyntax, "edit: unknown kind '" + kind + "'");
  auto target = doc.find("target");
  if (target == doc.end() || !target->is_string()) {
    throw Error(ErrorKind::kSyntax, "edit: missing string field 'target'");
  }
  edit.target = target->get<std::string>();
  if (auto it = doc.find("block"); it != doc.end()) edit.block = block_from_json(*it, "edit.block");
  if (doc.value("position", "after") == "before") edit.position = InsertPosition::kBefore;
  if (auto it = doc.find("value"); it != doc.end()) {
    if (it->is_array()) {
      std::vector<Value> items;
      for (const auto& v : *it) items.push_back(value_from_json(v, "edit.value"));
      edit.list_items = std::move(items);
    } else {
      edit.value = value_from_json(*it, "edit.value");
    }
  }
  return edit;
}

json edit_to_json(const Edit& edit) {
  json out = {{"kind", std::string(kEditNames[static_cast<int>(edit.kind)])},
              {"target", edit.target}};
  if (edit.block) out["block"] = block_to_json(*edit.block);
  if (edit.kind == EditKind::kInsertBlock) {
    out["position"] = edit.position == InsertPosition::kAfter ? "after" : "before";
  }
  if (edit.value) out["value"] = value_to_json(*edit.value);
  if (edit.list_items) {
    json arr = json::array();
    for (const auto& v : *edit.list_items) arr.push_back(value_to_json(v));
    out["value"] = std::move(arr);
  }
  return out;
}

}  // namespace blockdbg
