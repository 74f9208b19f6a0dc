#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "sublin/scenario_tree.hpp"

namespace sublin::tree {

/// Tree document layout:
///
///   {"format": "sublin-tree/1", "dim": 1,
///    "nodes": [{"id": 0, "parent": -1, "increment": [], "members": [[0.5, 0.5]]},
///              {"id": 1, "parent": 0, "increment": [-1.0]}, ...]}
///
/// Nodes are listed parents-first, `members` only on non-leaf nodes, each
/// member a probability list over the node's children in listing order.
nlohmann::json to_json(const ScenarioTree& tree);
ScenarioTree tree_from_json(const nlohmann::json& doc);

void write_tree(std::ostream& out, const ScenarioTree& tree);
ScenarioTree read_tree(std::istream& in);

}  // namespace sublin::tree
