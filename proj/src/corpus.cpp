#include "evipath/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "evipath/jsonl.hpp"

namespace evipath {

namespace {
constexpr int kFormatVersion = 1;

std::string passage_path(std::size_t doc_line, std::size_t p) {
  (void)doc_line;
  return "passages[" + std::to_string(p) + "]";
}
}  // namespace

std::size_t Passage::token_count() const {
  std::size_t n = 0;
  for (const auto& sentence : sentences) {
    n += sentence.size();
  }
  return n;
}

bool Passage::mentions_entity(const std::string& entity_id) const {
  return std::any_of(mentions.begin(), mentions.end(),
                     [&](const Mention& m) { return m.entity_id == entity_id; });
}

std::string Passage::text() const {
  std::string out;
  for (const auto& sentence : sentences) {
    for (const auto& token : sentence) {
      if (!out.empty()) {
        out += ' ';
      }
      out += token;
    }
  }
  return out;
}

namespace {

Document parse_document(const Json& record) {
  Document doc;
  doc.id = require_string(record, "id", "");
  if (doc.id.empty()) {
    throw std::runtime_error("id: must be non-empty");
  }
  if (record.contains("title")) {
    if (!record["title"].is_string()) {
      throw std::runtime_error("title: expected string");
    }
    doc.title = record["title"].get<std::string>();
  }
  const Json& passages = require_field(record, "passages", "");
  if (!passages.is_array()) {
    throw std::runtime_error("passages: expected array");
  }
  for (std::size_t p = 0; p < passages.size(); ++p) {
    const std::string ppath = passage_path(0, p);
    const Json& pj = passages[p];
    Passage passage;
    passage.id = require_string(pj, "id", ppath);
    if (passage.id.empty()) {
      throw std::runtime_error(ppath + ".id: must be non-empty");
    }
    passage.doc_id = doc.id;
    passage.index_in_doc = static_cast<int>(p);

    const Json& sentences = require_field(pj, "sentences", ppath);
    if (!sentences.is_array()) {
      throw std::runtime_error(ppath + ".sentences: expected array");
    }
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      const Json& sj = sentences[s];
      if (!sj.is_array()) {
        throw std::runtime_error(ppath + ".sentences[" + std::to_string(s) +
                                 "]: expected array of tokens");
      }
      std::vector<std::string> tokens;
      tokens.reserve(sj.size());
      for (std::size_t t = 0; t < sj.size(); ++t) {
        if (!sj[t].is_string()) {
          throw std::runtime_error(ppath + ".sentences[" + std::to_string(s) + "][" +
                                   std::to_string(t) + "]: expected string token");
        }
        tokens.push_back(sj[t].get<std::string>());
      }
      passage.sentences.push_back(std::move(tokens));
    }

    if (pj.contains("mentions")) {
      const Json& mentions = pj["mentions"];
      if (!mentions.is_array()) {
        throw std::runtime_error(ppath + ".mentions: expected array");
      }
      for (std::size_t m = 0; m < mentions.size(); ++m) {
        const std::string mpath = ppath + ".mentions[" + std::to_string(m) + "]";
        const Json& mj = mentions[m];
        Mention mention;
        mention.entity_id = require_string(mj, "entity", mpath);
        mention.sentence_idx = static_cast<int>(require_int(mj, "sentence", mpath));
        mention.start = static_cast<int>(require_int(mj, "start", mpath));
        mention.end = static_cast<int>(require_int(mj, "end", mpath));

        if (mention.sentence_idx < 0 ||
            mention.sentence_idx >= static_cast<int>(passage.sentences.size())) {
          throw std::runtime_error(mpath + ".sentence: index " +
                                   std::to_string(mention.sentence_idx) +
                                   " out of range (passage has " +
                                   std::to_string(passage.sentences.size()) + " sentences)");
        }
        if (mention.start >= mention.end) {
          throw std::runtime_error(mpath + ": empty span [" + std::to_string(mention.start) +
                                   ", " + std::to_string(mention.end) + ")");
        }
        const auto sentence_len =
            static_cast<int>(passage.sentences[mention.sentence_idx].size());
        if (mention.start < 0 || mention.end > sentence_len) {
          throw std::runtime_error(mpath + ": span [" + std::to_string(mention.start) + ", " +
                                   std::to_string(mention.end) + ") outside sentence of " +
                                   std::to_string(sentence_len) + " tokens");
        }
        passage.mentions.push_back(std::move(mention));
      }
    }
    doc.passages.push_back(std::move(passage));
  }
  return doc;
}

}  // namespace

void Corpus::register_document(Document doc, std::size_t line_no) {
  if (doc_by_id_.count(doc.id) != 0) {
    throw JsonlError(line_no, "id", "duplicate document id \"" + doc.id + "\"");
  }
  for (const auto& passage : doc.passages) {
    if (passage_by_id_.count(passage.id) != 0) {
      throw JsonlError(line_no, "passages",
                       "duplicate passage id \"" + passage.id + "\"");
    }
    passage_by_id_.emplace(passage.id, std::make_pair(documents_.size(),
                                                      static_cast<std::size_t>(passage.index_in_doc)));
  }
  doc_by_id_.emplace(doc.id, documents_.size());
  documents_.push_back(std::move(doc));
}

Corpus Corpus::ingest(std::istream& corpus_jsonl, std::istream* entity_vocab,
                      const IngestOptions& options) {
  Corpus corpus;

  if (entity_vocab != nullptr) {
    for_each_jsonl(*entity_vocab, [&](std::size_t line_no, const Json& record) {
      Entity entity;
      entity.id = require_string(record, "id", "");
      entity.canonical_name = require_string(record, "name", "");
      if (entity.id.empty()) {
        throw std::runtime_error("id: must be non-empty");
      }
      if (corpus.entities_.count(entity.id) != 0) {
        throw JsonlError(line_no, "id", "duplicate entity id \"" + entity.id + "\"");
      }
      corpus.entities_.emplace(entity.id, std::move(entity));
    });
  }

  for_each_jsonl(corpus_jsonl, [&](std::size_t line_no, const Json& record) {
    corpus.register_document(parse_document(record), line_no);
  });

  // Resolve mention entities after all documents are parsed.
  std::size_t auto_registered = 0;
  for (const auto& doc : corpus.documents_) {
    for (const auto& passage : doc.passages) {
      for (const auto& mention : passage.mentions) {
        if (corpus.entities_.count(mention.entity_id) != 0) {
          continue;
        }
        if (options.unknown_entities == UnknownEntityPolicy::Reject) {
          throw CorpusError("mention in passage \"" + passage.id +
                            "\" references unknown entity \"" + mention.entity_id + "\"");
        }
        corpus.entities_.emplace(mention.entity_id,
                                 Entity{mention.entity_id, mention.entity_id});
        ++auto_registered;
      }
    }
  }
  if (auto_registered > 0) {
    std::cerr << "[corpus] warning: auto-registered " << auto_registered
              << " entities mentioned but absent from the vocabulary\n";
  }

  corpus.index_ = corpus.rebuild_index();
  corpus.stats_.documents = corpus.documents_.size();
  corpus.stats_.entities = corpus.entities_.size();
  corpus.stats_.auto_registered_entities = auto_registered;
  for (const auto& doc : corpus.documents_) {
    corpus.stats_.passages += doc.passages.size();
    for (const auto& passage : doc.passages) {
      corpus.stats_.mentions += passage.mentions.size();
    }
  }
  return corpus;
}

Corpus::EntityIndex Corpus::rebuild_index() const {
  EntityIndex index;
  for (const auto& doc : documents_) {
    for (const auto& passage : doc.passages) {
      for (const auto& mention : passage.mentions) {
        auto& postings = index[mention.entity_id];
        postings.passage_ids.insert(passage.id);
        ++postings.doc_mention_counts[doc.id];
      }
    }
  }
  return index;
}

bool Corpus::verify_index() const {
  const EntityIndex rebuilt = rebuild_index();
  if (rebuilt.size() != index_.size()) {
    return false;
  }
  for (const auto& [entity_id, postings] : rebuilt) {
    auto it = index_.find(entity_id);
    if (it == index_.end() || it->second.passage_ids != postings.passage_ids ||
        it->second.doc_mention_counts != postings.doc_mention_counts) {
      return false;
    }
  }
  return true;
}

bool Corpus::has_document(const std::string& doc_id) const {
  return doc_by_id_.count(doc_id) != 0;
}

const Document& Corpus::document(const std::string& doc_id) const {
  auto it = doc_by_id_.find(doc_id);
  if (it == doc_by_id_.end()) {
    throw CorpusError("unknown document \"" + doc_id + "\"");
  }
  return documents_[it->second];
}

bool Corpus::has_passage(const std::string& passage_id) const {
  return passage_by_id_.count(passage_id) != 0;
}

const Passage& Corpus::passage(const std::string& passage_id) const {
  auto it = passage_by_id_.find(passage_id);
  if (it == passage_by_id_.end()) {
    throw CorpusError("unknown passage \"" + passage_id + "\"");
  }
  return documents_[it->second.first].passages[it->second.second];
}

bool Corpus::has_entity(const std::string& entity_id) const {
  return entities_.count(entity_id) != 0;
}

const Entity& Corpus::entity(const std::string& entity_id) const {
  auto it = entities_.find(entity_id);
  if (it == entities_.end()) {
    throw CorpusError("unknown entity \"" + entity_id + "\"");
  }
  return it->second;
}

std::vector<std::string> Corpus::passages_with_entity(const std::string& entity_id) const {
  auto it = index_.find(entity_id);
  if (it == index_.end()) {
    return {};
  }
  return {it->second.passage_ids.begin(), it->second.passage_ids.end()};
}

std::vector<std::string> Corpus::documents_with_entity(const std::string& entity_id,
                                                       std::size_t cap) const {
  auto it = index_.find(entity_id);
  if (it == index_.end()) {
    return {};
  }
  std::vector<std::pair<std::string, std::size_t>> docs(it->second.doc_mention_counts.begin(),
                                                        it->second.doc_mention_counts.end());
  std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) {
      return a.second > b.second;
    }
    return a.first < b.first;
  });
  if (docs.size() > cap) {
    docs.resize(cap);
  }
  std::vector<std::string> ids;
  ids.reserve(docs.size());
  for (auto& [id, count] : docs) {
    ids.push_back(id);
  }
  return ids;
}

std::size_t Corpus::mention_count(const std::string& entity_id, const std::string& doc_id) const {
  auto it = index_.find(entity_id);
  if (it == index_.end()) {
    return 0;
  }
  auto dit = it->second.doc_mention_counts.find(doc_id);
  return dit == it->second.doc_mention_counts.end() ? 0 : dit->second;
}

namespace {

Json document_to_json(const Document& doc) {
  Json passages = Json::array();
  for (const auto& passage : doc.passages) {
    Json sentences = Json::array();
    for (const auto& sentence : passage.sentences) {
      sentences.push_back(sentence);
    }
    Json mentions = Json::array();
    for (const auto& mention : passage.mentions) {
      mentions.push_back({{"entity", mention.entity_id},
                          {"sentence", mention.sentence_idx},
                          {"start", mention.start},
                          {"end", mention.end}});
    }
    passages.push_back({{"id", passage.id},
                        {"sentences", std::move(sentences)},
                        {"mentions", std::move(mentions)}});
  }
  return Json{{"id", doc.id}, {"title", doc.title}, {"passages", std::move(passages)}};
}

void write_or_throw(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw CorpusError("cannot open " + path.string() + " for writing");
  }
  out << contents;
  if (!out) {
    throw CorpusError("failed writing " + path.string());
  }
}

}  // namespace

void Corpus::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);

  std::string docs_out;
  for (const auto& doc : documents_) {
    docs_out += document_to_json(doc).dump();
    docs_out += '\n';
  }
  write_or_throw(dir / "documents.jsonl", docs_out);

  std::string entities_out;
  for (const auto& [id, entity] : entities_) {
    entities_out += Json{{"id", entity.id}, {"name", entity.canonical_name}}.dump();
    entities_out += '\n';
  }
  write_or_throw(dir / "entities.jsonl", entities_out);

  Json index_json = Json::object();
  for (const auto& [entity_id, postings] : index_) {
    Json docs = Json::object();
    for (const auto& [doc_id, count] : postings.doc_mention_counts) {
      docs[doc_id] = count;
    }
    index_json[entity_id] = {
        {"passages", std::vector<std::string>(postings.passage_ids.begin(),
                                              postings.passage_ids.end())},
        {"doc_counts", std::move(docs)}};
  }
  write_or_throw(dir / "index.json", index_json.dump());

  const Json manifest{{"format_version", kFormatVersion},
                      {"documents", stats_.documents},
                      {"passages", stats_.passages},
                      {"mentions", stats_.mentions},
                      {"entities", stats_.entities}};
  write_or_throw(dir / "manifest.json", manifest.dump(2) + "\n");
}

Corpus Corpus::load(const std::filesystem::path& dir) {
  std::ifstream manifest_in(dir / "manifest.json");
  if (!manifest_in) {
    throw CorpusError("no corpus store at " + dir.string() + " (missing manifest.json)");
  }
  Json manifest;
  manifest_in >> manifest;
  const int version = manifest.value("format_version", -1);
  if (version != kFormatVersion) {
    throw CorpusError("unsupported corpus format version " + std::to_string(version) +
                      " in " + dir.string());
  }

  Corpus corpus;

  std::ifstream entities_in(dir / "entities.jsonl");
  if (!entities_in) {
    throw CorpusError("missing entities.jsonl in " + dir.string());
  }
  for_each_jsonl(entities_in, [&](std::size_t, const Json& record) {
    Entity entity{require_string(record, "id", ""), require_string(record, "name", "")};
    corpus.entities_.emplace(entity.id, std::move(entity));
  });

  std::ifstream docs_in(dir / "documents.jsonl");
  if (!docs_in) {
    throw CorpusError("missing documents.jsonl in " + dir.string());
  }
  for_each_jsonl(docs_in, [&](std::size_t line_no, const Json& record) {
    corpus.register_document(parse_document(record), line_no);
  });

  corpus.index_ = corpus.rebuild_index();

  std::ifstream index_in(dir / "index.json");
  if (index_in) {
    Json stored;
    index_in >> stored;
    EntityIndex loaded;
    for (const auto& [entity_id, entry] : stored.items()) {
      EntityPostings postings;
      for (const auto& pid : entry.at("passages")) {
        postings.passage_ids.insert(pid.get<std::string>());
      }
      for (const auto& [doc_id, count] : entry.at("doc_counts").items()) {
        postings.doc_mention_counts[doc_id] = count.get<std::size_t>();
      }
      loaded.emplace(entity_id, std::move(postings));
    }
    if (loaded != corpus.index_) {
      throw CorpusError("stored entity index in " + dir.string() +
                        " disagrees with rebuild; store is corrupt");
    }
  }

  corpus.stats_.documents = corpus.documents_.size();
  corpus.stats_.entities = corpus.entities_.size();
  for (const auto& doc : corpus.documents_) {
    corpus.stats_.passages += doc.passages.size();
    for (const auto& passage : doc.passages) {
      corpus.stats_.mentions += passage.mentions.size();
    }
  }
  return corpus;
}

bool Corpus::structurally_equal(const Corpus& other) const {
  return documents_ == other.documents_ && entities_ == other.entities_;
}

}  // namespace evipath
