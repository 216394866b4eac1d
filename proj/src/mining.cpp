#include "evipath/mining.hpp"

#include <algorithm>
#include <chrono>

#include "evipath/corpus.hpp"
#include "evipath/graph.hpp"

namespace evipath {

std::set<std::string> doc_span(const Corpus& corpus, const EvidencePath& path) {
  std::set<std::string> docs;
  for (const auto& pid : path.passages) {
    docs.insert(corpus.passage(pid).doc_id);
  }
  return docs;
}

namespace {

struct Miner {
  const PassageGraph& graph;
  const std::size_t max_hops;

  std::vector<std::string> passages;
  std::vector<std::string> bridges;
  std::set<std::string> visited;
  std::set<std::string> used_bridges;

  std::set<std::vector<std::string>> seen_sequences;
  std::vector<EvidencePath> out;
  std::uint64_t nodes_visited = 0;

  void emit() {
    if (seen_sequences.insert(passages).second) {
      out.push_back(EvidencePath{passages, bridges, false});
    }
  }

  void expand(const std::string& current) {
    ++nodes_visited;
    if (passages.size() >= max_hops) {
      return;  // a further hop would exceed the budget
    }
    for (const auto& [next, entity] : graph.neighbors(current)) {
      if (visited.count(next) != 0) {
        continue;
      }
      if (entity == graph.head_entity || entity == graph.tail_entity) {
        continue;  // head/tail entities may not bridge
      }
      if (used_bridges.count(entity) != 0) {
        continue;
      }
      passages.push_back(next);
      bridges.push_back(entity);
      if (graph.tail_set.count(next) != 0) {
        emit();  // terminal: do not search past a tail passage
      } else {
        visited.insert(next);
        used_bridges.insert(entity);
        expand(next);
        used_bridges.erase(entity);
        visited.erase(next);
      }
      bridges.pop_back();
      passages.pop_back();
    }
  }

  void run() {
    for (const auto& start : graph.head_set) {  // std::set: ascending ids
      passages.assign(1, start);
      bridges.clear();
      if (graph.tail_set.count(start) != 0) {
        emit();  // degenerate 1-hop path; tail passages are terminal
        continue;
      }
      visited = {start};
      used_bridges.clear();
      expand(start);
    }
  }
};

}  // namespace

MiningReport mine_paths(const PassageGraph& graph, std::size_t max_hops) {
  const auto t0 = std::chrono::steady_clock::now();

  Miner miner{graph, max_hops, {}, {}, {}, {}, {}, {}, 0};
  if (max_hops >= 1) {
    miner.run();
  }

  MiningReport report;
  report.paths = std::move(miner.out);
  report.failed = report.paths.empty();
  report.stats.nodes_visited = miner.nodes_visited;
  report.stats.paths_emitted = report.paths.size();
  for (const auto& path : report.paths) {
    std::set<std::string> docs;
    for (const auto& pid : path.passages) {
      auto it = graph.node_doc.find(pid);
      if (it != graph.node_doc.end()) {
        docs.insert(it->second);
      }
    }
    if (docs.size() > 2) {
      ++report.stats.multi_doc_paths;
    }
  }
  report.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

std::vector<EvidencePath> redeem(const Corpus& corpus, const std::string& head,
                                 const std::string& tail) {
  const std::vector<std::string> head_passages = corpus.passages_with_entity(head);
  const std::vector<std::string> tail_passages = corpus.passages_with_entity(tail);

  std::vector<EvidencePath> paths;
  for (const auto& pid : head_passages) {
    if (std::binary_search(tail_passages.begin(), tail_passages.end(), pid)) {
      paths.push_back(EvidencePath{{pid}, {}, true});
    }
  }
  for (const auto& hp : head_passages) {
    for (const auto& tp : tail_passages) {
      if (hp != tp) {
        paths.push_back(EvidencePath{{hp, tp}, {}, true});
      }
    }
  }
  return paths;
}

std::string check_evidence_path(const Corpus& corpus, const std::string& head,
                                const std::string& tail, std::size_t max_hops,
                                const EvidencePath& path) {
  if (path.passages.empty()) {
    return "path has no passages";
  }
  for (const auto& pid : path.passages) {
    if (!corpus.has_passage(pid)) {
      return "unknown passage \"" + pid + "\"";
    }
  }
  if (!corpus.passage(path.passages.front()).mentions_entity(head)) {
    return "first passage lacks a head mention";
  }
  if (!corpus.passage(path.passages.back()).mentions_entity(tail)) {
    return "last passage lacks a tail mention";
  }
  {
    std::set<std::string> distinct(path.passages.begin(), path.passages.end());
    if (distinct.size() != path.passages.size()) {
      return "repeated passage";
    }
  }
  if (path.hop_count() > max_hops) {
    return "path exceeds the hop budget";
  }

  if (path.redemption) {
    if (!path.bridges.empty()) {
      return "redemption path carries bridges";
    }
    if (path.hop_count() > 2) {
      return "redemption path longer than 2 passages";
    }
    return {};
  }

  if (path.bridges.size() + 1 != path.passages.size()) {
    return "bridge count does not match hop count";
  }
  std::set<std::string> distinct_bridges(path.bridges.begin(), path.bridges.end());
  if (distinct_bridges.size() != path.bridges.size()) {
    return "repeated bridging entity";
  }
  for (std::size_t i = 0; i < path.bridges.size(); ++i) {
    const std::string& bridge = path.bridges[i];
    if (bridge == head || bridge == tail) {
      return "bridge equals the head or tail entity";
    }
    if (!corpus.passage(path.passages[i]).mentions_entity(bridge) ||
        !corpus.passage(path.passages[i + 1]).mentions_entity(bridge)) {
      return "hop " + std::to_string(i) + " is not licensed by entity \"" + bridge + "\"";
    }
  }
  return {};
}

}  // namespace evipath
