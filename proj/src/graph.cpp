#include "evipath/graph.hpp"

#include <algorithm>

#include "evipath/corpus.hpp"

namespace evipath {

std::size_t PassageGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& [node, nbrs] : adjacency) {
    total += nbrs.size();
  }
  return total / 2;
}

const std::vector<std::pair<std::string, std::string>>& PassageGraph::neighbors(
    const std::string& passage_id) const {
  const auto it = adjacency.find(passage_id);
  if (it == adjacency.end()) {
    throw GraphError("passage \"" + passage_id + "\" is not a graph node");
  }
  return it->second;
}

std::vector<std::tuple<std::string, std::string, std::string>> PassageGraph::edge_list()
    const {
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  for (const auto& [node, nbrs] : adjacency) {
    for (const auto& [nbr, entity] : nbrs) {
      if (node < nbr) {
        edges.emplace_back(node, nbr, entity);
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

PassageGraph build_graph(const Corpus& corpus, const std::string& head,
                         const std::string& tail, std::size_t doc_cap) {
  if (head == tail) {
    throw GraphError("head and tail entity must differ (got \"" + head + "\")");
  }
  if (!corpus.has_entity(head)) {
    throw GraphError("unknown head entity \"" + head + "\"");
  }
  if (!corpus.has_entity(tail)) {
    throw GraphError("unknown tail entity \"" + tail + "\"");
  }

  PassageGraph graph;
  graph.head_entity = head;
  graph.tail_entity = tail;

  std::set<std::string> kept_docs;
  for (const auto& doc_id : corpus.documents_with_entity(head, doc_cap)) {
    kept_docs.insert(doc_id);
  }
  for (const auto& doc_id : corpus.documents_with_entity(tail, doc_cap)) {
    kept_docs.insert(doc_id);
  }

  // entity id -> node passages mentioning it, in insertion (sorted) order
  std::map<std::string, std::vector<std::string>> entity_postings;
  for (const auto& doc_id : kept_docs) {
    const Document& doc = corpus.document(doc_id);
    for (const auto& passage : doc.passages) {
      graph.adjacency.emplace(passage.id, std::vector<std::pair<std::string, std::string>>{});
      graph.node_doc.emplace(passage.id, doc.id);

      std::set<std::string> distinct_entities;
      for (const auto& mention : passage.mentions) {
        distinct_entities.insert(mention.entity_id);
      }
      for (const auto& entity : distinct_entities) {
        entity_postings[entity].push_back(passage.id);
      }
      if (distinct_entities.count(head) != 0) {
        graph.head_set.insert(passage.id);
      }
      if (distinct_entities.count(tail) != 0) {
        graph.tail_set.insert(passage.id);
      }
    }
  }

  for (const auto& [entity, postings] : entity_postings) {
    for (std::size_t i = 0; i < postings.size(); ++i) {
      for (std::size_t j = i + 1; j < postings.size(); ++j) {
        graph.adjacency[postings[i]].emplace_back(postings[j], entity);
        graph.adjacency[postings[j]].emplace_back(postings[i], entity);
      }
    }
  }
  for (auto& [node, nbrs] : graph.adjacency) {
    std::sort(nbrs.begin(), nbrs.end());
  }
  return graph;
}

}  // namespace evipath
