#pragma once
// Entity-annotated document corpus: ingestion, validation, entity index,
// and a single-directory persistent store.
//
// The corpus is immutable once ingested; every lookup below is const and
// safe to call from concurrent readers.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace evipath {

struct Mention {
  std::string entity_id;
  int sentence_idx = 0;
  int start = 0;  // token span [start, end) within the sentence
  int end = 0;

  bool operator==(const Mention&) const = default;
};

struct Passage {
  std::string id;
  std::string doc_id;
  int index_in_doc = 0;
  std::vector<std::vector<std::string>> sentences;  // pre-tokenized
  std::vector<Mention> mentions;

  bool operator==(const Passage&) const = default;

  std::size_t token_count() const;
  bool mentions_entity(const std::string& entity_id) const;
  // Tokens joined by single spaces, sentences joined by single spaces.
  std::string text() const;
};

struct Document {
  std::string id;
  std::string title;
  std::vector<Passage> passages;

  bool operator==(const Document&) const = default;
};

struct Entity {
  std::string id;
  std::string canonical_name;

  bool operator==(const Entity&) const = default;
};

enum class UnknownEntityPolicy {
  AutoRegister,  // default: register with canonical_name = id, warn
  Reject,
};

struct IngestOptions {
  UnknownEntityPolicy unknown_entities = UnknownEntityPolicy::AutoRegister;
};

struct CorpusStats {
  std::size_t documents = 0;
  std::size_t passages = 0;
  std::size_t mentions = 0;
  std::size_t entities = 0;
  std::size_t auto_registered_entities = 0;
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Immutable corpus handle. Construction paths: ingest() from JSONL streams,
// or load() from a directory previously written by save().
class Corpus {
 public:
  // entity_vocab may be null (all entities then come from auto-registration).
  static Corpus ingest(std::istream& corpus_jsonl, std::istream* entity_vocab,
                       const IngestOptions& options = {});

  static Corpus load(const std::filesystem::path& dir);
  void save(const std::filesystem::path& dir) const;

  const CorpusStats& stats() const { return stats_; }
  const std::vector<Document>& documents() const { return documents_; }
  const std::map<std::string, Entity>& entities() const { return entities_; }

  bool has_document(const std::string& doc_id) const;
  const Document& document(const std::string& doc_id) const;
  bool has_passage(const std::string& passage_id) const;
  const Passage& passage(const std::string& passage_id) const;
  bool has_entity(const std::string& entity_id) const;
  const Entity& entity(const std::string& entity_id) const;

  // Exactly the passages carrying >= 1 mention of the entity, ascending id.
  // Unknown entity -> empty.
  std::vector<std::string> passages_with_entity(const std::string& entity_id) const;

  // All documents mentioning the entity when they number <= cap; otherwise
  // the cap documents with the most mentions, ties broken by ascending doc
  // id. Returned in (count desc, id asc) order.
  std::vector<std::string> documents_with_entity(const std::string& entity_id,
                                                 std::size_t cap) const;

  // Mentions of entity_id within one document (0 when absent).
  std::size_t mention_count(const std::string& entity_id, const std::string& doc_id) const;

  // Recomputes the entity index from scratch and compares with the live one.
  bool verify_index() const;

  bool structurally_equal(const Corpus& other) const;

 private:
  struct EntityPostings {
    std::set<std::string> passage_ids;
    std::map<std::string, std::size_t> doc_mention_counts;  // doc id -> count

    bool operator==(const EntityPostings&) const = default;
  };
  using EntityIndex = std::map<std::string, EntityPostings>;

  void register_document(Document doc, std::size_t line_no);
  EntityIndex rebuild_index() const;

  std::vector<Document> documents_;
  std::map<std::string, Entity> entities_;
  EntityIndex index_;
  CorpusStats stats_;

  std::unordered_map<std::string, std::size_t> doc_by_id_;
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> passage_by_id_;
};

}  // namespace evipath
