#pragma once
// Constrained depth-first enumeration of evidence paths: chains of passages
// from a head-mention passage to a tail-mention passage, each hop licensed
// by a shared bridging entity.
//
// A path is emitted the moment it reaches a tail passage; tail passages are
// terminal and are never extended through. Constraints along a path:
//   - no repeated passages, no repeated bridging entities
//   - no bridge equal to the head or tail entity
//   - at most max_hops passages
// Emission order is depth-first over sorted adjacency from sorted start
// nodes; emitted paths are deduplicated by exact passage sequence (the first
// bridge labeling encountered wins).

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace evipath {

class Corpus;
struct PassageGraph;

struct EvidencePath {
  std::vector<std::string> passages;
  std::vector<std::string> bridges;  // size passages-1 for mined paths, empty for redemption
  bool redemption = false;

  std::size_t hop_count() const { return passages.size(); }

  bool operator==(const EvidencePath&) const = default;
};

// Documents touched by the path.
std::set<std::string> doc_span(const Corpus& corpus, const EvidencePath& path);

struct MiningStats {
  std::uint64_t nodes_visited = 0;
  std::size_t paths_emitted = 0;
  std::size_t multi_doc_paths = 0;  // paths spanning > 2 documents
  double wall_seconds = 0.0;
};

enum class Redemption { None, HeadTailPassages };

struct MiningReport {
  std::vector<EvidencePath> paths;
  bool failed = false;  // true iff the constrained search found nothing
  Redemption redemption_used = Redemption::None;
  MiningStats stats;
};

MiningReport mine_paths(const PassageGraph& graph, std::size_t max_hops);

// Appendix-style fallback when mining fails: passages holding both entities
// become 1-element paths; then every (head passage, tail passage) pair with
// distinct members becomes a 2-element path with no bridges.
std::vector<EvidencePath> redeem(const Corpus& corpus, const std::string& head,
                                 const std::string& tail);

// Independent validity check from corpus annotations alone (no graph, no
// traversal state). Returns an empty string when the path satisfies every
// invariant, else a human-readable reason.
std::string check_evidence_path(const Corpus& corpus, const std::string& head,
                                const std::string& tail, std::size_t max_hops,
                                const EvidencePath& path);

}  // namespace evipath
