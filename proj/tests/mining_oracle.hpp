#pragma once
// Exhaustive reference for path mining: enumerate every simple passage
// sequence from a head passage to the first tail passage it touches, then
// keep the sequences that admit at least one valid bridge labeling
// (distinct bridges, none equal to head/tail). Built independently of the
// miner: plain recursion over node sets and label sets.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "evipath/corpus.hpp"
#include "evipath/graph.hpp"

namespace evitest {

struct MiningOracle {
  std::set<std::string> nodes;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> labels;
  std::set<std::string> head_set;
  std::set<std::string> tail_set;
  std::string head;
  std::string tail;

  static MiningOracle from_corpus(const evipath::Corpus& corpus, const std::string& head,
                                  const std::string& tail, std::size_t doc_cap) {
    MiningOracle oracle;
    oracle.head = head;
    oracle.tail = tail;
    std::set<std::string> kept;
    for (const auto& d : corpus.documents_with_entity(head, doc_cap)) {
      kept.insert(d);
    }
    for (const auto& d : corpus.documents_with_entity(tail, doc_cap)) {
      kept.insert(d);
    }
    std::map<std::string, std::set<std::string>> entities_of;
    for (const auto& doc_id : kept) {
      for (const auto& passage : corpus.document(doc_id).passages) {
        oracle.nodes.insert(passage.id);
        for (const auto& mention : passage.mentions) {
          entities_of[passage.id].insert(mention.entity_id);
        }
        if (passage.mentions_entity(head)) {
          oracle.head_set.insert(passage.id);
        }
        if (passage.mentions_entity(tail)) {
          oracle.tail_set.insert(passage.id);
        }
      }
    }
    for (const auto& p : oracle.nodes) {
      for (const auto& q : oracle.nodes) {
        if (p == q) {
          continue;
        }
        for (const auto& entity : entities_of[p]) {
          if (entities_of[q].count(entity) != 0) {
            oracle.labels[{p, q}].insert(entity);
          }
        }
      }
    }
    return oracle;
  }

  // Does any injective bridge labeling avoid the head/tail entities?
  bool labelable(const std::vector<std::string>& sequence, std::size_t hop,
                 std::set<std::string>& used) const {
    if (hop + 1 >= sequence.size()) {
      return true;
    }
    const auto it = labels.find({sequence[hop], sequence[hop + 1]});
    if (it == labels.end()) {
      return false;
    }
    for (const auto& entity : it->second) {
      if (entity == head || entity == tail || used.count(entity) != 0) {
        continue;
      }
      used.insert(entity);
      if (labelable(sequence, hop + 1, used)) {
        used.erase(entity);
        return true;
      }
      used.erase(entity);
    }
    return false;
  }

  void extend(std::vector<std::string>& sequence, std::set<std::string>& on_path,
              std::size_t max_hops, std::set<std::vector<std::string>>& out) const {
    const std::string last = sequence.back();  // push_back below may reallocate
    if (tail_set.count(last) != 0) {
      std::set<std::string> used;
      if (labelable(sequence, 0, used)) {
        out.insert(sequence);
      }
      return;  // tail passages are terminal
    }
    if (sequence.size() >= max_hops) {
      return;
    }
    for (const auto& next : nodes) {
      if (on_path.count(next) != 0) {
        continue;
      }
      if (labels.count({last, next}) == 0) {
        continue;
      }
      sequence.push_back(next);
      on_path.insert(next);
      extend(sequence, on_path, max_hops, out);
      on_path.erase(next);
      sequence.pop_back();
    }
  }

  std::set<std::vector<std::string>> enumerate(std::size_t max_hops) const {
    std::set<std::vector<std::string>> out;
    for (const auto& start : head_set) {
      std::vector<std::string> sequence{start};
      std::set<std::string> on_path{start};
      extend(sequence, on_path, max_hops, out);
    }
    return out;
  }
};

}  // namespace evitest
