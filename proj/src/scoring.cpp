#include "evipath/scoring.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <stdexcept>

#include "evipath/bm25.hpp"
#include "evipath/embedding.hpp"
#include "evipath/text.hpp"

namespace evipath {

Query render_query(const Entity& head, const Entity& tail) {
  if (head.canonical_name.empty()) {
    throw std::invalid_argument("head entity \"" + head.id + "\" has an empty name");
  }
  if (tail.canonical_name.empty()) {
    throw std::invalid_argument("tail entity \"" + tail.id + "\" has an empty name");
  }
  Query query{head, tail, {}};
  query.text = "What is the relation between " + head.canonical_name + " and " +
               tail.canonical_name + "?";
  return query;
}

double sim(std::span<const float> query_vec, std::span<const float> passage_vec) {
  if (query_vec.size() != passage_vec.size()) {
    throw std::invalid_argument("sim: dimension mismatch (" +
                                std::to_string(query_vec.size()) + " vs " +
                                std::to_string(passage_vec.size()) + ")");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < query_vec.size(); ++i) {
    acc += static_cast<double>(query_vec[i]) * static_cast<double>(passage_vec[i]);
  }
  return acc;
}

ScoredPath score_path_pair(const Query& query, const EvidencePath& path,
                           EmbeddingProvider& emb) {
  if (path.passages.empty()) {
    throw std::invalid_argument("cannot score an empty path");
  }
  const std::span<const float> qv = emb.query_vector(query.text);
  double acc = 0.0;
  for (const auto& pid : path.passages) {
    acc += sim(qv, emb.passage_vector(pid));
  }
  return {path, acc / static_cast<double>(path.passages.size()), "dense_pair"};
}

ScoredPath score_path_sequential(const Query& query, const EvidencePath& path,
                                 EmbeddingProvider& emb, const Corpus& corpus) {
  if (path.passages.empty()) {
    throw std::invalid_argument("cannot score an empty path");
  }
  double acc = sim(emb.query_vector(query.text), emb.passage_vector(path.passages.front()));
  for (std::size_t i = 1; i < path.passages.size(); ++i) {
    const std::string& prev = path.passages[i - 1];
    const std::string aug_key = concat_query_passage(query.text, corpus.passage(prev).text());
    std::span<const float> aug_vec;
    try {
      aug_vec = emb.query_vector(aug_key);
    } catch (const MissingEmbeddingError&) {
      throw MissingEmbeddingError("no embedding for the query augmented with passage \"" +
                                  prev + "\"");
    }
    acc += sim(aug_vec, emb.passage_vector(path.passages[i]));
  }
  return {path, acc / static_cast<double>(path.passages.size()), "dense_sequential"};
}

// ---------------------------------------------------------------------------
// Scorer family

void PathScorer::prepare(const std::vector<EvidencePath>&) {}

Bm25PathScorer::Bm25PathScorer(const Query& query, const Bm25Index& index)
    : query_terms_(normalize_text(query.text)), index_(index) {}

double Bm25PathScorer::score(const EvidencePath& path) const {
  if (path.passages.empty()) {
    throw std::invalid_argument("cannot score an empty path");
  }
  double acc = 0.0;
  for (const auto& pid : path.passages) {
    acc += index_.score(query_terms_, pid);
  }
  return acc / static_cast<double>(path.passages.size());
}

DensePairScorer::DensePairScorer(Query query, EmbeddingProvider& emb)
    : query_(std::move(query)), emb_(emb) {}

double DensePairScorer::score(const EvidencePath& path) const {
  return score_path_pair(query_, path, emb_).score;
}

void DensePairScorer::prepare(const std::vector<EvidencePath>& paths) {
  std::vector<std::string> passage_ids;
  for (const auto& path : paths) {
    passage_ids.insert(passage_ids.end(), path.passages.begin(), path.passages.end());
  }
  emb_.prefetch_queries({query_.text});
  emb_.prefetch_passages(passage_ids);
}

DenseSequentialScorer::DenseSequentialScorer(Query query, EmbeddingProvider& emb,
                                             const Corpus& corpus)
    : query_(std::move(query)), emb_(emb), corpus_(corpus) {}

double DenseSequentialScorer::score(const EvidencePath& path) const {
  return score_path_sequential(query_, path, emb_, corpus_).score;
}

void DenseSequentialScorer::prepare(const std::vector<EvidencePath>& paths) {
  std::vector<std::string> passage_ids;
  std::vector<std::string> query_keys{query_.text};
  for (const auto& path : paths) {
    passage_ids.insert(passage_ids.end(), path.passages.begin(), path.passages.end());
    for (std::size_t i = 0; i + 1 < path.passages.size(); ++i) {
      query_keys.push_back(
          concat_query_passage(query_.text, corpus_.passage(path.passages[i]).text()));
    }
  }
  emb_.prefetch_queries(query_keys);
  emb_.prefetch_passages(passage_ids);
}

namespace {

std::uint64_t fnv1a(std::uint64_t hash, std::string_view data) {
  for (const char c : data) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double RandomPathScorer::score(const EvidencePath& path) const {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const auto& pid : path.passages) {
    hash = fnv1a(hash, pid);
    hash = fnv1a(hash, "\x1f");
  }
  const std::uint64_t mixed = splitmix64(hash ^ seed_);
  // 53 mantissa bits -> uniform double in [0, 1)
  return static_cast<double>(mixed >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Batch kernels and ranking

std::vector<ScoredPath> score_paths_serial(const std::vector<EvidencePath>& paths,
                                           const PathScorer& scorer) {
  std::vector<ScoredPath> scored(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    scored[i] = {paths[i], scorer.score(paths[i]), scorer.id()};
  }
  return scored;
}

std::vector<ScoredPath> score_paths_parallel(const std::vector<EvidencePath>& paths,
                                             const PathScorer& scorer, int threads) {
  std::vector<ScoredPath> scored(paths.size());
  const std::string scorer_id = scorer.id();
  const auto n = static_cast<std::int64_t>(paths.size());
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(nthreads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      scored[i] = {paths[i], scorer.score(paths[i]), scorer_id};
    } catch (...) {
#pragma omp critical(evipath_score_failure)
      if (!failure) {
        failure = std::current_exception();
      }
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
  return scored;
}

namespace {

bool ranks_before(const ScoredPath& a, const ScoredPath& b) {
  if (a.score != b.score) {
    return a.score > b.score;
  }
  if (a.path.passages.size() != b.path.passages.size()) {
    return a.path.passages.size() < b.path.passages.size();
  }
  if (a.path.passages != b.path.passages) {
    return a.path.passages < b.path.passages;
  }
  return a.path.bridges < b.path.bridges;
}

}  // namespace

std::vector<ScoredPath> rank_paths(const std::vector<EvidencePath>& paths,
                                   PathScorer& scorer, std::size_t top_k,
                                   bool parallel, int threads) {
  if (top_k == 0) {
    throw std::invalid_argument("top_k must be >= 1");
  }
  scorer.prepare(paths);
  std::vector<ScoredPath> scored = parallel ? score_paths_parallel(paths, scorer, threads)
                                            : score_paths_serial(paths, scorer);
  std::sort(scored.begin(), scored.end(), ranks_before);
  if (scored.size() > top_k) {
    scored.resize(top_k);
  }
  return scored;
}

}  // namespace evipath
