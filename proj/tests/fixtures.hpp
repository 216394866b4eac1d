#pragma once
// Shared builders for tests: in-memory corpora, random corpus generation,
// temp directories, file helpers.

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "evipath/corpus.hpp"
#include "evipath/jsonl.hpp"

namespace evitest {

using evipath::Corpus;
using evipath::Json;

inline Corpus corpus_from_jsonl(const std::string& corpus_jsonl,
                                const std::string& entities_jsonl = "") {
  std::istringstream corpus_in(corpus_jsonl);
  if (entities_jsonl.empty()) {
    return Corpus::ingest(corpus_in, nullptr);
  }
  std::istringstream entities_in(entities_jsonl);
  return Corpus::ingest(corpus_in, &entities_in);
}

// One document per call site: doc id, passages as (id, sentences, mentions).
struct PassageSpec {
  std::string id;
  std::vector<std::vector<std::string>> sentences;
  // (entity, sentence, start, end)
  std::vector<std::tuple<std::string, int, int, int>> mentions;
};

inline Json doc_json(const std::string& doc_id, const std::vector<PassageSpec>& passages,
                     const std::string& title = "") {
  Json passages_json = Json::array();
  for (const auto& spec : passages) {
    Json mentions = Json::array();
    for (const auto& [entity, sentence, start, end] : spec.mentions) {
      mentions.push_back({{"entity", entity}, {"sentence", sentence}, {"start", start}, {"end", end}});
    }
    passages_json.push_back(
        {{"id", spec.id}, {"sentences", spec.sentences}, {"mentions", mentions}});
  }
  return Json{{"id", doc_id}, {"title", title}, {"passages", passages_json}};
}

// A fluent random-corpus generator used by oracle tests. Every passage gets
// one sentence of filler tokens; mentions are span [0, 1) of that sentence.
struct RandomCorpusSpec {
  std::size_t docs = 8;
  std::size_t passages_per_doc = 3;
  std::size_t entity_pool = 6;
  double mention_rate = 2.0;  // mean entities mentioned per passage
  std::uint64_t seed = 0;
};

inline std::string random_corpus_jsonl(const RandomCorpusSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::poisson_distribution<int> mention_count(spec.mention_rate);
  std::uniform_int_distribution<std::size_t> entity_pick(0, spec.entity_pool - 1);
  std::string out;
  for (std::size_t d = 0; d < spec.docs; ++d) {
    std::vector<PassageSpec> passages;
    for (std::size_t p = 0; p < spec.passages_per_doc; ++p) {
      PassageSpec ps;
      ps.id = "d" + std::to_string(d) + "p" + std::to_string(p);
      ps.sentences = {{"filler", "tokens", "here"}};
      const int mentions = std::min(mention_count(rng), static_cast<int>(spec.entity_pool));
      std::vector<std::size_t> chosen;
      for (int m = 0; m < mentions; ++m) {
        chosen.push_back(entity_pick(rng));
      }
      std::sort(chosen.begin(), chosen.end());
      chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
      for (const std::size_t e : chosen) {
        ps.mentions.emplace_back("e" + std::to_string(e), 0, 0, 1);
      }
      passages.push_back(std::move(ps));
    }
    out += doc_json("d" + std::to_string(d), passages).dump();
    out += '\n';
  }
  return out;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("evipath_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void spit(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << contents;
}

}  // namespace evitest
