#include "evipath/input_prep.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "evipath/corpus.hpp"
#include "evipath/mining.hpp"

namespace evipath {

namespace {

// A (possibly partial) sentence scheduled for the output.
struct Chunk {
  std::string passage_id;
  int sentence_idx = 0;
  int token_begin = 0;
  int token_end = 0;
  bool augmented = false;

  int size() const { return token_end - token_begin; }
};

struct CoreSentence {
  std::size_t slot;  // position of the owning passage within the path
  int sentence_idx = 0;
  std::size_t mention_count = 0;
  bool is_protected = false;  // carries a head or tail mention
  bool dropped = false;
  int tokens = 0;
};

// Flat view of a document as (passage id, sentence idx) in document order.
std::vector<SentenceRef> flatten_document(const Document& doc) {
  std::vector<SentenceRef> refs;
  for (const auto& passage : doc.passages) {
    for (std::size_t s = 0; s < passage.sentences.size(); ++s) {
      refs.push_back({passage.id, static_cast<int>(s)});
    }
  }
  return refs;
}

}  // namespace

PreparedContext prepare_input(const EvidencePath& path, const Corpus& corpus,
                              std::size_t budget, const std::string& head,
                              const std::string& tail) {
  if (budget == 0) {
    throw std::invalid_argument("token budget must be >= 1");
  }
  if (path.passages.empty()) {
    throw std::invalid_argument("cannot prepare an empty path");
  }

  const std::size_t slots = path.passages.size();
  std::vector<const Passage*> passages(slots);
  for (std::size_t i = 0; i < slots; ++i) {
    passages[i] = &corpus.passage(path.passages[i]);  // throws on unknown id
  }

  std::vector<CoreSentence> core;
  std::size_t total = 0;
  for (std::size_t slot = 0; slot < slots; ++slot) {
    const Passage& p = *passages[slot];
    for (std::size_t s = 0; s < p.sentences.size(); ++s) {
      CoreSentence cs;
      cs.slot = slot;
      cs.sentence_idx = static_cast<int>(s);
      cs.tokens = static_cast<int>(p.sentences[s].size());
      for (const auto& mention : p.mentions) {
        if (mention.sentence_idx == static_cast<int>(s)) {
          ++cs.mention_count;
          if (mention.entity_id == head || mention.entity_id == tail) {
            cs.is_protected = true;
          }
        }
      }
      total += static_cast<std::size_t>(cs.tokens);
      core.push_back(cs);
    }
  }

  PreparedContext ctx;
  ctx.budget = budget;

  // Per-slot augmentation chunks; core chunks are derived from `core`.
  std::vector<std::vector<Chunk>> preceding(slots);   // nearest-first
  std::vector<std::vector<Chunk>> succeeding(slots);  // nearest-first

  if (total > budget) {
    // Shrink: drop the least-mentioned unprotected sentence, latest position
    // first on ties, until the budget holds or only protected text remains.
    while (total > budget) {
      CoreSentence* pick = nullptr;
      for (auto& cs : core) {
        if (cs.dropped || cs.is_protected) {
          continue;
        }
        if (pick == nullptr || cs.mention_count < pick->mention_count ||
            (cs.mention_count == pick->mention_count &&
             std::make_pair(cs.slot, cs.sentence_idx) >
                 std::make_pair(pick->slot, pick->sentence_idx))) {
          pick = &cs;
        }
      }
      if (pick == nullptr) {
        break;
      }
      pick->dropped = true;
      total -= static_cast<std::size_t>(pick->tokens);
      ctx.dropped_sentences.push_back(
          {path.passages[pick->slot], pick->sentence_idx});
    }
  } else if (total < budget) {
    // Grow: pull whole sentences from each passage's document, alternating
    // sides per passage, round-robin across passages.
    std::set<std::pair<std::string, int>> used;
    for (std::size_t slot = 0; slot < slots; ++slot) {
      const Passage& p = *passages[slot];
      for (std::size_t s = 0; s < p.sentences.size(); ++s) {
        used.insert({p.id, static_cast<int>(s)});
      }
    }

    struct SlotCursor {
      std::vector<SentenceRef> doc_sentences;
      std::ptrdiff_t prev = -1;   // walks backward
      std::size_t next = 0;       // walks forward
      bool take_preceding = true; // alternation toggle
    };
    std::vector<SlotCursor> cursors(slots);
    for (std::size_t slot = 0; slot < slots; ++slot) {
      SlotCursor& cur = cursors[slot];
      cur.doc_sentences = flatten_document(corpus.document(passages[slot]->doc_id));
      // locate the span this passage occupies within the flat document
      std::size_t first = 0;
      std::size_t count = 0;
      std::size_t insert_at = 0;  // anchor for passages with no sentences
      for (std::size_t i = 0; i < cur.doc_sentences.size(); ++i) {
        const SentenceRef& ref = cur.doc_sentences[i];
        if (ref.passage_id == passages[slot]->id) {
          if (count == 0) {
            first = i;
          }
          ++count;
        } else if (corpus.passage(ref.passage_id).index_in_doc <
                   passages[slot]->index_in_doc) {
          insert_at = i + 1;
        }
      }
      if (count == 0) {
        first = insert_at;
      }
      cur.prev = static_cast<std::ptrdiff_t>(first) - 1;
      cur.next = first + count;
    }

    std::size_t room = budget - total;
    bool progressed = true;
    while (room > 0 && progressed) {
      progressed = false;
      for (std::size_t slot = 0; slot < slots && room > 0; ++slot) {
        SlotCursor& cur = cursors[slot];
        // Try the toggled side first, then the other.
        for (int side_try = 0; side_try < 2; ++side_try) {
          const bool want_preceding = side_try == 0 ? cur.take_preceding : !cur.take_preceding;
          const SentenceRef* ref = nullptr;
          if (want_preceding) {
            while (cur.prev >= 0 &&
                   used.count({cur.doc_sentences[cur.prev].passage_id,
                               cur.doc_sentences[cur.prev].sentence_idx}) != 0) {
              --cur.prev;
            }
            if (cur.prev >= 0) {
              ref = &cur.doc_sentences[cur.prev];
            }
          } else {
            while (cur.next < cur.doc_sentences.size() &&
                   used.count({cur.doc_sentences[cur.next].passage_id,
                               cur.doc_sentences[cur.next].sentence_idx}) != 0) {
              ++cur.next;
            }
            if (cur.next < cur.doc_sentences.size()) {
              ref = &cur.doc_sentences[cur.next];
            }
          }
          if (ref == nullptr) {
            continue;  // this side is exhausted
          }

          const auto& sentence =
              corpus.passage(ref->passage_id).sentences[ref->sentence_idx];
          const int len = static_cast<int>(sentence.size());
          const int take = std::min<int>(len, static_cast<int>(room));
          Chunk chunk;
          chunk.passage_id = ref->passage_id;
          chunk.sentence_idx = ref->sentence_idx;
          chunk.augmented = true;
          if (want_preceding) {
            chunk.token_begin = len - take;  // keep tokens adjacent to the window
            chunk.token_end = len;
            preceding[slot].push_back(chunk);
            --cur.prev;
          } else {
            chunk.token_begin = 0;
            chunk.token_end = take;
            succeeding[slot].push_back(chunk);
            ++cur.next;
          }
          used.insert({ref->passage_id, ref->sentence_idx});
          room -= static_cast<std::size_t>(take);
          cur.take_preceding = !want_preceding;
          progressed = true;  // a sentence was consumed, even a zero-token one
          break;
        }
      }
    }
  }

  // Assemble: per path slot, preceding (document order), core, succeeding.
  auto append_chunk = [&](const Chunk& chunk) {
    const Passage& p = corpus.passage(chunk.passage_id);
    const auto& sentence = p.sentences[chunk.sentence_idx];
    const std::size_t begin = ctx.tokens.size();
    for (int t = chunk.token_begin; t < chunk.token_end; ++t) {
      ctx.tokens.push_back(sentence[t]);
      ctx.source_map.push_back({chunk.passage_id, chunk.sentence_idx, t, chunk.augmented});
    }
    if (chunk.augmented && chunk.size() > 0) {
      ctx.augmented_spans.push_back({begin, ctx.tokens.size(), chunk.passage_id});
    }
  };

  std::size_t core_cursor = 0;
  for (std::size_t slot = 0; slot < slots; ++slot) {
    for (auto it = preceding[slot].rbegin(); it != preceding[slot].rend(); ++it) {
      append_chunk(*it);  // farthest-back sentence first
    }
    const Passage& p = *passages[slot];
    for (std::size_t s = 0; s < p.sentences.size(); ++s, ++core_cursor) {
      const CoreSentence& cs = core[core_cursor];
      if (cs.dropped) {
        continue;
      }
      Chunk chunk{p.id, static_cast<int>(s), 0, static_cast<int>(p.sentences[s].size()), false};
      append_chunk(chunk);
    }
    for (const Chunk& chunk : succeeding[slot]) {
      append_chunk(chunk);
    }
  }

  // Terminal fallback: every droppable sentence is gone and the protected
  // remainder still overflows. Cut trailing tokens to land exactly on L.
  if (ctx.tokens.size() > budget) {
    ctx.tokens.resize(budget);
    ctx.source_map.resize(budget);
    for (auto& span : ctx.augmented_spans) {
      span.begin = std::min(span.begin, budget);
      span.end = std::min(span.end, budget);
    }
    std::erase_if(ctx.augmented_spans,
                  [](const AugmentedSpan& s) { return s.begin >= s.end; });
    ctx.truncated = true;
  }
  return ctx;
}

bool validate_context(const PreparedContext& ctx, const Corpus& corpus,
                      const std::string& head, const std::string& tail) {
  if (ctx.length() > ctx.budget) {
    return false;
  }
  std::set<std::tuple<std::string, int, int>> present;
  std::set<std::string> passage_ids;
  for (const auto& origin : ctx.source_map) {
    present.insert({origin.passage_id, origin.sentence_idx, origin.token_idx});
    passage_ids.insert(origin.passage_id);
  }

  auto mention_survives = [&](const Mention& mention, const std::string& pid) {
    for (int t = mention.start; t < mention.end; ++t) {
      if (present.count({pid, mention.sentence_idx, t}) == 0) {
        return false;
      }
    }
    return true;
  };

  bool head_found = false;
  bool tail_found = false;
  for (const auto& pid : passage_ids) {
    const Passage& passage = corpus.passage(pid);
    for (const auto& mention : passage.mentions) {
      if (mention.entity_id != head && mention.entity_id != tail) {
        continue;
      }
      if (mention_survives(mention, pid)) {
        (mention.entity_id == head ? head_found : tail_found) = true;
        if (head_found && tail_found) {
          return true;
        }
      }
    }
  }
  return head_found && tail_found;
}

}  // namespace evipath
