#include "sublin/tree_io.hpp"

#include <istream>
#include <ostream>

#include "sublin/errors.hpp"

namespace sublin::tree {

namespace {

constexpr const char* kFormat = "sublin-tree/1";

}  // namespace

nlohmann::json to_json(const ScenarioTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < tree.node_count(); ++i) {
    nlohmann::json n;
    n["id"] = i;
    n["parent"] = tree.parent(i);
    n["increment"] = i == 0 ? Point{} : tree.increment(i);
    if (!tree.members(i).empty()) n["members"] = tree.members(i);
    nodes.push_back(std::move(n));
  }
  return nlohmann::json{{"format", kFormat}, {"dim", tree.dim()}, {"nodes", std::move(nodes)}};
}

ScenarioTree tree_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format", std::string{}) != kFormat)
      throw InvalidArgument(std::string("tree document: expected format ") + kFormat);
    const auto dim = doc.at("dim").get<std::size_t>();
    std::vector<NodeSpec> nodes;
    const auto& list = doc.at("nodes");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& n = list[i];
      if (n.contains("id") && n.at("id").get<std::size_t>() != i)
        throw InvalidArgument("tree document: node ids must be 0..N-1 in order");
      NodeSpec spec;
      spec.parent = n.at("parent").get<std::int64_t>();
      spec.increment = n.value("increment", Point{});
      if (i == 0) spec.increment.clear();
      if (n.contains("members")) spec.members = n.at("members").get<std::vector<std::vector<double>>>();
      nodes.push_back(std::move(spec));
    }
    return ScenarioTree(dim, std::move(nodes));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("tree document: ") + e.what());
  }
}

void write_tree(std::ostream& out, const ScenarioTree& tree) { out << to_json(tree).dump(1) << '\n'; }

ScenarioTree read_tree(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("tree document: ") + e.what());
  }
  return tree_from_json(doc);
}

}  // namespace sublin::tree
