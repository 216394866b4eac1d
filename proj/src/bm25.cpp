#include "evipath/bm25.hpp"

#include <cmath>

#include "evipath/corpus.hpp"
#include "evipath/text.hpp"

namespace evipath {

Bm25Index Bm25Index::build(const Corpus& corpus, Bm25Params params) {
  Bm25Index index;
  index.params_ = params;

  std::size_t total_len = 0;
  for (const auto& doc : corpus.documents()) {
    for (const auto& passage : doc.passages) {
      const std::vector<std::string> terms = normalize_text(passage.text());
      std::unordered_map<std::string, std::size_t> freqs;
      for (const auto& term : terms) {
        ++freqs[term];
      }
      for (const auto& [term, tf] : freqs) {
        ++index.doc_freqs_[term];
      }
      index.passage_slot_.emplace(passage.id, index.term_freqs_.size());
      index.lengths_.push_back(terms.size());
      index.term_freqs_.push_back(std::move(freqs));
      total_len += terms.size();
    }
  }
  index.avg_length_ = index.lengths_.empty()
                          ? 0.0
                          : static_cast<double>(total_len) /
                                static_cast<double>(index.lengths_.size());
  return index;
}

double Bm25Index::idf(const std::string& term) const {
  const auto it = doc_freqs_.find(term);
  const double df = it == doc_freqs_.end() ? 0.0 : static_cast<double>(it->second);
  const double n = static_cast<double>(lengths_.size());
  return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

double Bm25Index::score(const std::vector<std::string>& query_terms,
                        const std::string& passage_id) const {
  const auto slot_it = passage_slot_.find(passage_id);
  if (slot_it == passage_slot_.end()) {
    throw std::out_of_range("bm25: passage \"" + passage_id + "\" is not indexed");
  }
  const auto& freqs = term_freqs_[slot_it->second];
  const double len = static_cast<double>(lengths_[slot_it->second]);
  const double norm =
      params_.k1 * (1.0 - params_.b + params_.b * (avg_length_ > 0.0 ? len / avg_length_ : 0.0));

  double score = 0.0;
  for (const auto& term : query_terms) {
    const auto tf_it = freqs.find(term);
    if (tf_it == freqs.end()) {
      continue;  // tf = 0 zeroes the term component
    }
    const double tf = static_cast<double>(tf_it->second);
    score += idf(term) * tf * (params_.k1 + 1.0) / (tf + norm);
  }
  return score;
}

}  // namespace evipath
