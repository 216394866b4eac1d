#pragma once
// Length adjustment of a ranked evidence path for a downstream consumer
// with a fixed token budget L.
//
// Over budget: iteratively drop the sentence with the fewest entity
// mentions among sentences carrying no head/tail mention (ties: the latest
// (passage, sentence) goes first). If the droppable sentences run out,
// trailing tokens are truncated to exactly L and a flag records it.
//
// Under budget: extend each path passage with whole sentences from its
// document, alternating preceding/succeeding per passage (preceding first)
// and round-robin across passages, until L is reached or the documents are
// exhausted. The final added sentence may be cut to land exactly on L:
// preceding sentences keep their trailing tokens, succeeding ones their
// leading tokens, so added text stays adjacent to what it extends.

#include <cstddef>
#include <string>
#include <vector>

namespace evipath {

class Corpus;
struct EvidencePath;

struct TokenOrigin {
  std::string passage_id;  // passage the token came from (may be a neighbor)
  int sentence_idx = 0;
  int token_idx = 0;
  bool augmented = false;

  bool operator==(const TokenOrigin&) const = default;
};

struct SentenceRef {
  std::string passage_id;
  int sentence_idx = 0;

  bool operator==(const SentenceRef&) const = default;
};

struct AugmentedSpan {
  std::size_t begin = 0;  // token range [begin, end) in the output
  std::size_t end = 0;
  std::string passage_id;  // origin of the added sentence
};

struct PreparedContext {
  std::vector<std::string> tokens;
  std::vector<TokenOrigin> source_map;  // one entry per token
  std::vector<SentenceRef> dropped_sentences;
  std::vector<AugmentedSpan> augmented_spans;
  std::size_t budget = 0;
  bool truncated = false;

  std::size_t length() const { return tokens.size(); }
};

PreparedContext prepare_input(const EvidencePath& path, const Corpus& corpus,
                              std::size_t budget, const std::string& head,
                              const std::string& tail);

// True iff the context is within budget and still carries at least one
// complete head mention and one complete tail mention.
bool validate_context(const PreparedContext& ctx, const Corpus& corpus,
                      const std::string& head, const std::string& tail);

}  // namespace evipath
