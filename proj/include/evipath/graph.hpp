#pragma once
// Multi-document passage graph for one (head, tail) entity pair. Nodes are
// the passages of documents carrying head or tail mentions (after the
// per-entity document cap); an edge labeled e links two passages iff both
// mention e. Edges are stored symmetrically; parallel edges carry distinct
// entity labels. Built graphs are immutable.

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace evipath {

class Corpus;

struct PassageGraph {
  std::string head_entity;
  std::string tail_entity;

  // passage id -> sorted (neighbor passage id, shared entity id)
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> adjacency;
  std::map<std::string, std::string> node_doc;  // passage id -> document id
  std::set<std::string> head_set;               // passages with a head mention
  std::set<std::string> tail_set;               // passages with a tail mention

  bool has_node(const std::string& passage_id) const {
    return adjacency.count(passage_id) != 0;
  }
  std::size_t node_count() const { return adjacency.size(); }
  std::size_t edge_count() const;  // undirected edges, parallel labels counted

  // Sorted adjacency; throws on unknown node.
  const std::vector<std::pair<std::string, std::string>>& neighbors(
      const std::string& passage_id) const;

  // Deterministic undirected edge list: (p, q, entity) with p < q, sorted.
  std::vector<std::tuple<std::string, std::string, std::string>> edge_list() const;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// doc_cap bounds each entity's document set (most mentions first, ties by
// ascending doc id) before nodes are collected. head == tail is invalid;
// entities with no documents yield an empty (or one-sided) graph.
PassageGraph build_graph(const Corpus& corpus, const std::string& head,
                         const std::string& tail, std::size_t doc_cap);

}  // namespace evipath
