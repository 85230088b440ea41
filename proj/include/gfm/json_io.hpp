#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gfm/graph.hpp"

namespace gfm {

/// Graph plus optional categorical labels: `atoms` per vertex and `bonds`
/// aligned with g.edges(). Empty vectors mean unlabeled.
struct LabeledGraph {
  Graph g;
  std::vector<int> atoms;
  std::vector<int> bonds;
};

/// Document form: {"n": int, "edges": [[u,v], ...]} with optional
/// "atoms" and "bonds" arrays.
nlohmann::json graph_to_json(const LabeledGraph& g);
LabeledGraph graph_from_json(const nlohmann::json& doc);

/// JSON-lines corpus, one graph document per line.
std::vector<LabeledGraph> read_corpus(const std::string& path);
void write_corpus(const std::string& path, const std::vector<LabeledGraph>& graphs);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace gfm
