#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "gfm/graph.hpp"
#include "gfm/json_io.hpp"

using namespace gfm;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
  std::string cmd = std::string(GFM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gfm_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("graph documents") {
  LabeledGraph g{Graph::from_edge_list(3, {{0, 1}, {1, 2}}), {0, 1, 0}, {2, 1}};
  json doc = graph_to_json(g);
  LabeledGraph back = graph_from_json(doc);
  CHECK(back.g == g.g);
  CHECK(back.atoms == g.atoms);
  CHECK(back.bonds == g.bonds);

  CHECK_THROWS(graph_from_json(json::parse(R"({"edges": []})")));              // missing n
  CHECK_THROWS(graph_from_json(json::parse(R"({"n": 2, "edges": [[0]]})")));   // bad edge entry
  CHECK_THROWS(graph_from_json(json::parse(R"({"n": 2, "edges": [[0, 5]]})")));
  CHECK_THROWS(graph_from_json(json::parse(R"({"n": 2, "edges": [], "atoms": [0]})")));
  CHECK_THROWS(graph_from_json(json::parse(R"({"n": 2, "edges": [[0,1]], "bonds": [0, 1]})")));

  TempDir dir;
  write_text_file(dir.file("bad.jsonl"), "{\"n\": 1, \"edges\": []}\nnot-json\n");
  CHECK_THROWS(read_corpus(dir.file("bad.jsonl")));
  CHECK_THROWS(read_corpus(dir.file("missing.jsonl")));
}

TEST_CASE("sample command: named priors and determinism") {
  TempDir dir;
  write_text_file(dir.file("tree.json"), R"({"prior": "tree"})");

  REQUIRE(run_cli("sample --config " + dir.file("tree.json") + " --graphs 5 --nodes 10 --seed 3 --out " +
                  dir.file("a.jsonl")) == 0);
  auto corpus = read_corpus(dir.file("a.jsonl"));
  REQUIRE(corpus.size() == 5);
  for (const auto& g : corpus) CHECK(is_acyclic(g.g));

  // byte-identical on repeat
  REQUIRE(run_cli("sample --config " + dir.file("tree.json") + " --graphs 5 --nodes 10 --seed 3 --out " +
                  dir.file("b.jsonl")) == 0);
  CHECK(read_text_file(dir.file("a.jsonl")) == read_text_file(dir.file("b.jsonl")));

  // different seed differs
  REQUIRE(run_cli("sample --config " + dir.file("tree.json") + " --graphs 5 --nodes 10 --seed 4 --out " +
                  dir.file("c.jsonl")) == 0);
  CHECK(read_text_file(dir.file("a.jsonl")) != read_text_file(dir.file("c.jsonl")));

  // inline kernel grid: probability one gives complete graphs
  write_text_file(dir.file("dense.json"),
                  R"({"graphon": {"m": 1, "values": [[1.0]]}, "rho": {"kind": "constant", "rho": 1.0}})");
  REQUIRE(run_cli("sample --config " + dir.file("dense.json") + " --graphs 3 --nodes 6 --seed 1 --out " +
                  dir.file("dense.jsonl")) == 0);
  for (const auto& g : read_corpus(dir.file("dense.jsonl"))) CHECK(g.g == Graph::complete(6));
}

TEST_CASE("couple command: self-coupling is the identity at zero cost") {
  TempDir dir;
  write_text_file(dir.file("dense.json"),
                  R"({"graphon": {"m": 1, "values": [[0.7]]}, "rho": {"kind": "constant", "rho": 1.0}})");
  REQUIRE(run_cli("sample --config " + dir.file("dense.json") + " --graphs 4 --nodes 7 --seed 9 --out " +
                  dir.file("corpus.jsonl")) == 0);

  REQUIRE(run_cli("couple --noise " + dir.file("corpus.jsonl") + " --target " + dir.file("corpus.jsonl") +
                  " --seed 9 --out " + dir.file("coupling.json")) == 0);
  json doc = json::parse(read_text_file(dir.file("coupling.json")));
  auto assignment = doc.at("assignment").get<std::vector<int>>();
  for (int i = 0; i < 4; ++i) {
    CHECK(assignment[static_cast<std::size_t>(i)] == i);
    CHECK(doc.at("D")[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)].get<double>() <= 1e-9);
  }
}

TEST_CASE("flow run reproduces coupled targets with the displacement field") {
  TempDir dir;
  write_text_file(dir.file("dense.json"),
                  R"({"graphon": {"m": 1, "values": [[0.8]]}, "rho": {"kind": "constant", "rho": 1.0}})");
  REQUIRE(run_cli("sample --config " + dir.file("dense.json") + " --graphs 3 --nodes 8 --seed 11 --out " +
                  dir.file("noise.jsonl")) == 0);
  REQUIRE(run_cli("sample --config " + dir.file("dense.json") + " --graphs 3 --nodes 8 --seed 12 --out " +
                  dir.file("target.jsonl")) == 0);
  REQUIRE(run_cli("couple --noise " + dir.file("noise.jsonl") + " --target " + dir.file("target.jsonl") +
                  " --seed 11 --out " + dir.file("coupling.json")) == 0);
  // dense targets need loose caps for the projection to keep every edge
  write_text_file(dir.file("chem.json"), R"({"max_valence": [99, 99, 99, 99]})");
  REQUIRE(run_cli("flow run --coupling " + dir.file("coupling.json") + " --config " + dir.file("chem.json") +
                  " --steps 12 --seed 11 --out " + dir.file("gen.jsonl")) == 0);

  auto generated = read_corpus(dir.file("gen.jsonl"));
  REQUIRE(generated.size() == 3);

  // each output is isomorphic to the coupled slice of its target
  json doc = json::parse(read_text_file(dir.file("coupling.json")));
  auto targets = read_corpus(dir.file("target.jsonl"));
  for (std::size_t k = 0; k < generated.size(); ++k) {
    const auto& entry = doc.at("pairs")[k];
    int j = entry.at("target_index").get<int>();
    int budget = entry.at("n").get<int>();
    if (budget == targets[static_cast<std::size_t>(j)].g.vertex_count())
      CHECK(canonical_form(generated[k].g) == canonical_form(targets[static_cast<std::size_t>(j)].g));
  }
}

TEST_CASE("couple honors categorical feature priors") {
  TempDir dir;
  write_text_file(dir.file("dense.json"),
                  R"({"graphon": {"m": 1, "values": [[0.9]]}, "rho": {"kind": "constant", "rho": 1.0}})");
  REQUIRE(run_cli("sample --config " + dir.file("dense.json") + " --graphs 2 --nodes 5 --seed 17 --out " +
                  dir.file("corpus.jsonl")) == 0);
  write_text_file(dir.file("features.json"),
                  R"({"dx": 3, "df": 2, "atom_prior": [1.0, 0.0, 0.0], "bond_prior": [0.0, 1.0]})");
  REQUIRE(run_cli("couple --noise " + dir.file("corpus.jsonl") + " --target " + dir.file("corpus.jsonl") +
                  " --config " + dir.file("features.json") + " --seed 17 --out " +
                  dir.file("coupling.json")) == 0);
  json doc = json::parse(read_text_file(dir.file("coupling.json")));
  for (const auto& pair : doc.at("pairs")) {
    for (const auto& row : pair.at("s0").at("X")) {
      REQUIRE(row.size() == 3);
      CHECK(row[0].get<double>() == 1.0);  // degenerate prior pins type 0
      CHECK(row[1].get<double>() == 0.0);
    }
    REQUIRE(pair.at("s0").at("F").size() == 2);
  }
}

TEST_CASE("couple recovers a planted corpus permutation") {
  TempDir dir;
  // labeled, pairwise non-isomorphic noise corpus
  std::vector<LabeledGraph> noise;
  noise.push_back({Graph::path(5), {0, 1, 0, 1, 0}, {0, 1, 0, 1}});
  noise.push_back({Graph::cycle(5), {0, 0, 1, 1, 2}, {0, 0, 0, 1, 1}});
  noise.push_back({Graph::complete(4), {0, 1, 2, 3}, {0, 0, 0, 0, 0, 0}});
  noise.push_back({Graph::from_edge_list(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}), {2, 0, 0, 0, 0},
                   {1, 1, 1, 1}});
  write_corpus(dir.file("noise.jsonl"), noise);

  // targets: graph-level shuffle sigma plus node relabelings, labels carried
  std::vector<int> sigma{2, 0, 3, 1};
  std::vector<LabeledGraph> target(noise.size());
  for (std::size_t i = 0; i < noise.size(); ++i) {
    const auto& src = noise[i];
    int n = src.g.vertex_count();
    std::vector<int> mapping(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) mapping[static_cast<std::size_t>(v)] = (v + 1) % n;
    Permutation pi(mapping);
    LabeledGraph moved;
    moved.g = permute(src.g, pi);
    moved.atoms.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) moved.atoms[static_cast<std::size_t>(pi(v))] = src.atoms[static_cast<std::size_t>(v)];
    // bond labels follow the sorted edge order of the permuted graph
    moved.bonds.resize(src.bonds.size());
    const auto& src_edges = src.g.edges();
    for (std::size_t e = 0; e < src_edges.size(); ++e) {
      int a = pi(src_edges[e].first), b = pi(src_edges[e].second);
      if (a > b) std::swap(a, b);
      const auto& dst_edges = moved.g.edges();
      for (std::size_t f = 0; f < dst_edges.size(); ++f)
        if (dst_edges[f] == std::pair(a, b)) moved.bonds[f] = src.bonds[e];
    }
    target[static_cast<std::size_t>(sigma[i])] = std::move(moved);
  }
  write_corpus(dir.file("target.jsonl"), target);

  REQUIRE(run_cli("couple --noise " + dir.file("noise.jsonl") + " --target " + dir.file("target.jsonl") +
                  " --seed 3 --out " + dir.file("coupling.json")) == 0);
  json doc = json::parse(read_text_file(dir.file("coupling.json")));
  CHECK(doc.at("assignment").get<std::vector<int>>() == sigma);
  for (std::size_t i = 0; i < sigma.size(); ++i)
    CHECK(doc.at("D")[i][static_cast<std::size_t>(sigma[i])].get<double>() <= 1e-9);
}

TEST_CASE("ideal-field generation does not depend on the step count") {
  TempDir dir;
  write_text_file(dir.file("dense.json"),
                  R"({"graphon": {"m": 1, "values": [[0.8]]}, "rho": {"kind": "constant", "rho": 1.0}})");
  REQUIRE(run_cli("sample --config " + dir.file("dense.json") + " --graphs 3 --nodes 7 --seed 31 --out " +
                  dir.file("noise.jsonl")) == 0);
  REQUIRE(run_cli("sample --config " + dir.file("dense.json") + " --graphs 3 --nodes 7 --seed 32 --out " +
                  dir.file("target.jsonl")) == 0);
  REQUIRE(run_cli("couple --noise " + dir.file("noise.jsonl") + " --target " + dir.file("target.jsonl") +
                  " --seed 31 --out " + dir.file("coupling.json")) == 0);
  write_text_file(dir.file("chem.json"), R"({"max_valence": [99, 99, 99, 99]})");
  REQUIRE(run_cli("flow run --coupling " + dir.file("coupling.json") + " --config " + dir.file("chem.json") +
                  " --steps 1 --seed 31 --out " + dir.file("k1.jsonl")) == 0);
  REQUIRE(run_cli("flow run --coupling " + dir.file("coupling.json") + " --config " + dir.file("chem.json") +
                  " --steps 50 --seed 31 --out " + dir.file("k50.jsonl")) == 0);
  CHECK(read_text_file(dir.file("k1.jsonl")) == read_text_file(dir.file("k50.jsonl")));
}

TEST_CASE("eval command emits the report document") {
  TempDir dir;
  write_text_file(dir.file("dense.json"),
                  R"({"graphon": {"m": 1, "values": [[0.5]]}, "rho": {"kind": "constant", "rho": 1.0}})");
  REQUIRE(run_cli("sample --config " + dir.file("dense.json") + " --graphs 4 --nodes 7 --seed 1 --out " +
                  dir.file("gen.jsonl")) == 0);
  REQUIRE(run_cli("sample --config " + dir.file("dense.json") + " --graphs 4 --nodes 7 --seed 2 --out " +
                  dir.file("train.jsonl")) == 0);
  REQUIRE(run_cli("sample --config " + dir.file("dense.json") + " --graphs 4 --nodes 7 --seed 3 --out " +
                  dir.file("test.jsonl")) == 0);
  REQUIRE(run_cli("eval --gen " + dir.file("gen.jsonl") + " --train " + dir.file("train.jsonl") +
                  " --test " + dir.file("test.jsonl") + " --out " + dir.file("report.json")) == 0);
  json report = json::parse(read_text_file(dir.file("report.json")));
  for (const char* key : {"deg_ratio", "clus_ratio", "orbit_ratio", "valid", "unique", "novel"})
    CHECK(report.contains(key));
  CHECK(report.at("valid").get<double>() >= 0.0);
}

TEST_CASE("verify command exit codes") {
  TempDir dir;
  CHECK(run_cli("verify flow --seed 5 --out " + dir.file("flow.json")) == 0);
  json report = json::parse(read_text_file(dir.file("flow.json")));
  CHECK(report.at("pass").get<bool>());
  CHECK(run_cli("verify nonsense") == 2);
  CHECK(run_cli("bogus-subcommand") == 2);
  CHECK(run_cli("flow") == 2);  // missing 'run'
}

TEST_CASE("pipeline determinism across repeated runs") {
  TempDir dir;
  write_text_file(dir.file("prior.json"), R"({"prior": "molecular"})");

  auto pipeline = [&](const std::string& tag) {
    REQUIRE(run_cli("sample --config " + dir.file("prior.json") + " --graphs 3 --nodes 9 --seed 21 --out " +
                    dir.file("noise" + tag + ".jsonl")) == 0);
    REQUIRE(run_cli("sample --config " + dir.file("prior.json") + " --graphs 3 --nodes 9 --seed 22 --out " +
                    dir.file("target" + tag + ".jsonl")) == 0);
    REQUIRE(run_cli("couple --noise " + dir.file("noise" + tag + ".jsonl") + " --target " +
                    dir.file("target" + tag + ".jsonl") + " --seed 21 --out " +
                    dir.file("coupling" + tag + ".json")) == 0);
    REQUIRE(run_cli("flow run --coupling " + dir.file("coupling" + tag + ".json") +
                    " --steps 7 --seed 21 --out " + dir.file("gen" + tag + ".jsonl")) == 0);
  };
  pipeline("1");
  pipeline("2");
  CHECK(read_text_file(dir.file("noise1.jsonl")) == read_text_file(dir.file("noise2.jsonl")));
  CHECK(read_text_file(dir.file("coupling1.json")) == read_text_file(dir.file("coupling2.json")));
  CHECK(read_text_file(dir.file("gen1.jsonl")) == read_text_file(dir.file("gen2.jsonl")));
}
