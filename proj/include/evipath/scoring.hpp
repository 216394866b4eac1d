#pragma once
// Evidence-path scoring: the query template, inner-product similarity,
// pair scoring (mean query-passage similarity), sequential contextual
// scoring (each hop scored against the query concatenated with the previous
// passage), and top-K ranking with a deterministic total order.
//
// Batch scoring has two interchangeable kernels: a serial reference and an
// OpenMP one. They produce identical results; the serial kernel stays as
// the comparison baseline for tests and benchmarks.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "evipath/corpus.hpp"
#include "evipath/mining.hpp"

namespace evipath {

class EmbeddingProvider;
class Bm25Index;

struct Query {
  Entity head;
  Entity tail;
  std::string text;
};

// "What is the relation between {head} and {tail}?" — names substituted
// verbatim, no escaping. Empty names are an error.
Query render_query(const Entity& head, const Entity& tail);

// Inner product accumulated in double; dimensions must agree.
double sim(std::span<const float> query_vec, std::span<const float> passage_vec);

struct ScoredPath {
  EvidencePath path;
  double score = 0.0;
  std::string scorer_id;
};

ScoredPath score_path_pair(const Query& query, const EvidencePath& path,
                           EmbeddingProvider& emb);

// Sequential scoring needs passage text to build augmented-query keys.
ScoredPath score_path_sequential(const Query& query, const EvidencePath& path,
                                 EmbeddingProvider& emb, const Corpus& corpus);

// ---------------------------------------------------------------------------
// Scorer family

class PathScorer {
 public:
  virtual ~PathScorer() = default;
  virtual std::string id() const = 0;
  // Pure and safe to call concurrently for distinct paths.
  virtual double score(const EvidencePath& path) const = 0;
  // Optional warm-up (embedding prefetch) before a batch is scored.
  virtual void prepare(const std::vector<EvidencePath>& paths);
};

// Mean Okapi BM25 between the normalized query and each path passage.
class Bm25PathScorer final : public PathScorer {
 public:
  Bm25PathScorer(const Query& query, const Bm25Index& index);
  std::string id() const override { return "bm25"; }
  double score(const EvidencePath& path) const override;

 private:
  std::vector<std::string> query_terms_;
  const Bm25Index& index_;
};

class DensePairScorer final : public PathScorer {
 public:
  DensePairScorer(Query query, EmbeddingProvider& emb);
  std::string id() const override { return "dense_pair"; }
  double score(const EvidencePath& path) const override;
  void prepare(const std::vector<EvidencePath>& paths) override;

 private:
  Query query_;
  EmbeddingProvider& emb_;
};

class DenseSequentialScorer final : public PathScorer {
 public:
  DenseSequentialScorer(Query query, EmbeddingProvider& emb, const Corpus& corpus);
  std::string id() const override { return "dense_sequential"; }
  double score(const EvidencePath& path) const override;
  void prepare(const std::vector<EvidencePath>& paths) override;

 private:
  Query query_;
  EmbeddingProvider& emb_;
  const Corpus& corpus_;
};

// Seeded pseudo-random scores keyed by path content: a deterministic shuffle
// that is independent of enumeration order and thread count.
class RandomPathScorer final : public PathScorer {
 public:
  explicit RandomPathScorer(std::uint64_t seed) : seed_(seed) {}
  std::string id() const override { return "random"; }
  double score(const EvidencePath& path) const override;

 private:
  std::uint64_t seed_;
};

// ---------------------------------------------------------------------------
// Batch kernels and ranking

std::vector<ScoredPath> score_paths_serial(const std::vector<EvidencePath>& paths,
                                           const PathScorer& scorer);
// OpenMP over paths; per-path arithmetic is identical to the serial kernel.
std::vector<ScoredPath> score_paths_parallel(const std::vector<EvidencePath>& paths,
                                             const PathScorer& scorer, int threads = 0);

// Descending score; ties broken by fewer hops, then lexicographic passage
// sequence, then bridges. At most top_k results.
std::vector<ScoredPath> rank_paths(const std::vector<EvidencePath>& paths,
                                   PathScorer& scorer, std::size_t top_k,
                                   bool parallel = false, int threads = 0);

}  // namespace evipath
