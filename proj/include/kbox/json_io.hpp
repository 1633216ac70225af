#pragma once

#include <json.hpp>

#include "kbox/kripke.hpp"

namespace kbox {

// Model file format:
//   {"worlds": ["x","y"], "edges": [["x","y"]], "val": {"x": [0], "y": []}}
// Atoms are listed by index; worlds absent from "val" have every atom false.
nlohmann::json model_to_json(const KripkeModel& m);
KripkeModel model_from_json(const nlohmann::json& j);  // throws ModelError

// Tree models carry an extra "root" field.
nlohmann::json tree_to_json(const TreeModel& t);
TreeModel tree_from_json(const nlohmann::json& j);

}  // namespace kbox
