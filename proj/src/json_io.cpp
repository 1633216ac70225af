#include "kbox/json_io.hpp"

namespace kbox {

using nlohmann::json;

json model_to_json(const KripkeModel& m) {
  json worlds = json::array();
  for (const auto& w : m.worlds()) worlds.push_back(w);
  json edges = json::array();
  for (const auto& e : m.edges()) edges.push_back(json::array({e.first, e.second}));
  json val = json::object();
  for (const auto& w : m.worlds()) {
    json atoms = json::array();
    for (unsigned a : m.atoms_at(w)) atoms.push_back(a);
    val[w] = std::move(atoms);
  }
  return json{{"worlds", std::move(worlds)}, {"edges", std::move(edges)}, {"val", std::move(val)}};
}

KripkeModel model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("worlds") || !j["worlds"].is_array())
    throw ModelError("model JSON needs a \"worlds\" array");
  std::set<KripkeModel::World> worlds;
  for (const auto& w : j["worlds"]) {
    if (!w.is_string()) throw ModelError("world identifiers must be strings");
    if (!worlds.insert(w.get<std::string>()).second)
      throw ModelError("duplicate world '" + w.get<std::string>() + "'");
  }
  std::set<KripkeModel::Edge> edges;
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw ModelError("\"edges\" must be an array of pairs");
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
        throw ModelError("each edge must be a pair of world identifiers");
      edges.insert({e[0].get<std::string>(), e[1].get<std::string>()});
    }
  }
  std::map<KripkeModel::World, std::set<unsigned>> val;
  if (j.contains("val")) {
    if (!j["val"].is_object()) throw ModelError("\"val\" must map worlds to atom lists");
    for (const auto& [w, atoms] : j["val"].items()) {
      if (!atoms.is_array()) throw ModelError("valuation of '" + w + "' must be an array");
      std::set<unsigned> set;
      for (const auto& a : atoms) {
        if (!a.is_number_unsigned()) throw ModelError("atom indices must be natural numbers");
        set.insert(a.get<unsigned>());
      }
      val[w] = std::move(set);
    }
  }
  return KripkeModel(worlds, edges, val);
}

json tree_to_json(const TreeModel& t) {
  json j = model_to_json(t.model());
  j["root"] = t.root();
  return j;
}

TreeModel tree_from_json(const json& j) {
  if (!j.is_object() || !j.contains("root") || !j["root"].is_string())
    throw ModelError("tree model JSON needs a \"root\" string");
  return TreeModel(model_from_json(j), j["root"].get<std::string>());
}

}  // namespace kbox
