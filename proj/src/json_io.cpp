#include "gfm/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gfm {

using nlohmann::json;

json graph_to_json(const LabeledGraph& g) {
  json doc;
  doc["n"] = g.g.vertex_count();
  json edges = json::array();
  for (auto [u, v] : g.g.edges()) edges.push_back(json::array({u, v}));
  doc["edges"] = edges;
  if (!g.atoms.empty()) doc["atoms"] = g.atoms;
  if (!g.bonds.empty()) doc["bonds"] = g.bonds;
  return doc;
}

LabeledGraph graph_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("edges"))
    throw std::invalid_argument("graph document must contain \"n\" and \"edges\"");
  int n = doc.at("n").get<int>();
  std::vector<std::pair<int, int>> pairs;
  for (const auto& e : doc.at("edges")) {
    if (!e.is_array() || e.size() != 2)
      throw std::invalid_argument("edge entries must be [u, v] pairs");
    pairs.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  LabeledGraph out;
  out.g = Graph::from_edge_list(n, pairs);
  if (doc.contains("atoms")) {
    out.atoms = doc.at("atoms").get<std::vector<int>>();
    if (static_cast<int>(out.atoms.size()) != n)
      throw std::invalid_argument("atoms array length must equal n");
  }
  if (doc.contains("bonds")) {
    out.bonds = doc.at("bonds").get<std::vector<int>>();
    if (out.bonds.size() != out.g.edges().size())
      throw std::invalid_argument("bonds array length must equal the edge count");
  }
  return out;
}

std::vector<LabeledGraph> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::vector<LabeledGraph> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(graph_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_corpus(const std::string& path, const std::vector<LabeledGraph>& graphs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  for (const auto& g : graphs) out << graph_to_json(g).dump() << "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace gfm
