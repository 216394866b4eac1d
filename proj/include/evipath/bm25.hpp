#pragma once
// Okapi BM25 over normalized passage text.
//
// idf(t)  = ln((N - df + 0.5) / (df + 0.5) + 1)
// tc(t,p) = tf * (k1 + 1) / (tf + k1 * (1 - b + b * len/avglen))
// score   = sum over query terms of idf * tc
//
// Statistics are exactly recomputable from the normalized corpus; the index
// is immutable after build and safe for concurrent readers.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace evipath {

class Corpus;

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
};

class Bm25Index {
 public:
  static Bm25Index build(const Corpus& corpus, Bm25Params params = {});

  // Normalized-term scoring; throws on unknown passage id. A passage sharing
  // no term with the query scores exactly 0.
  double score(const std::vector<std::string>& query_terms,
               const std::string& passage_id) const;

  double idf(const std::string& term) const;
  std::size_t passage_count() const { return lengths_.size(); }
  double avg_length() const { return avg_length_; }
  const Bm25Params& params() const { return params_; }

 private:
  Bm25Params params_;
  double avg_length_ = 0.0;
  std::unordered_map<std::string, std::size_t> passage_slot_;
  std::vector<std::unordered_map<std::string, std::size_t>> term_freqs_;
  std::vector<std::size_t> lengths_;
  std::unordered_map<std::string, std::size_t> doc_freqs_;
};

}  // namespace evipath
