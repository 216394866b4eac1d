#include <doctest.h>

#include <cmath>
#include <random>

#include "evipath/bm25.hpp"
#include "evipath/corpus.hpp"
#include "evipath/text.hpp"
#include "fixtures.hpp"

using namespace evipath;
using evitest::PassageSpec;

namespace {

// Straight-line reimplementation of the scoring formula, sharing only the
// text normalizer. Used as the dual-implementation oracle.
double oracle_bm25(const Corpus& corpus, const std::vector<std::string>& query_terms,
                   const std::string& passage_id, double k1, double b) {
  std::vector<std::pair<std::string, std::vector<std::string>>> normalized;
  for (const auto& doc : corpus.documents()) {
    for (const auto& passage : doc.passages) {
      normalized.emplace_back(passage.id, normalize_text(passage.text()));
    }
  }
  const double n = static_cast<double>(normalized.size());
  double avglen = 0.0;
  for (const auto& [pid, terms] : normalized) {
    avglen += static_cast<double>(terms.size());
  }
  avglen /= n;

  const std::vector<std::string>* target = nullptr;
  for (const auto& [pid, terms] : normalized) {
    if (pid == passage_id) {
      target = &terms;
    }
  }
  REQUIRE(target != nullptr);

  double score = 0.0;
  for (const auto& term : query_terms) {
    double df = 0.0;
    for (const auto& [pid, terms] : normalized) {
      if (std::count(terms.begin(), terms.end(), term) > 0) {
        df += 1.0;
      }
    }
    const double tf = static_cast<double>(std::count(target->begin(), target->end(), term));
    if (tf == 0.0) {
      continue;
    }
    const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    const double len = static_cast<double>(target->size());
    score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avglen));
  }
  return score;
}

Corpus random_text_corpus(std::uint64_t seed, std::size_t passages) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> vocab = {"river",  "stone",  "harbor", "violet",
                                          "engine", "copper", "meadow", "signal",
                                          "lantern", "orchid", "timber", "falcon"};
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::uniform_int_distribution<int> sentence_len(3, 9);
  std::string jsonl;
  for (std::size_t p = 0; p < passages; ++p) {
    PassageSpec ps;
    ps.id = "p" + std::to_string(p);
    std::vector<std::string> sentence;
    const int len = sentence_len(rng);
    for (int t = 0; t < len; ++t) {
      sentence.push_back(vocab[word(rng)]);
    }
    ps.sentences = {sentence};
    jsonl += evitest::doc_json("d" + std::to_string(p), {ps}).dump() + "\n";
  }
  return evitest::corpus_from_jsonl(jsonl);
}

}  // namespace

TEST_CASE("hand-evaluated single-passage score") {
  // one passage, tf=1, len == avglen: tf component is exactly 1, so the
  // score is the smoothed idf ln(4/3)
  const std::string jsonl =
      evitest::doc_json("d1", {PassageSpec{"p1", {{"floyd", "music", "band"}}, {}}}).dump() +
      "\n";
  const Corpus corpus = evitest::corpus_from_jsonl(jsonl);
  const Bm25Index index = Bm25Index::build(corpus);
  CHECK(index.passage_count() == 1);
  CHECK(index.avg_length() == doctest::Approx(3.0));
  CHECK(index.score({"floyd"}, "p1") == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("zero term overlap scores exactly zero") {
  const std::string jsonl =
      evitest::doc_json("d1", {PassageSpec{"p1", {{"alpha", "beta"}}, {}},
                               PassageSpec{"p2", {{"gamma", "delta"}}, {}}})
          .dump() +
      "\n";
  const Corpus corpus = evitest::corpus_from_jsonl(jsonl);
  const Bm25Index index = Bm25Index::build(corpus);
  CHECK(index.score({"gamma"}, "p1") == 0.0);
  CHECK(index.score({"zeta", "theta"}, "p1") == 0.0);
  CHECK(index.score({}, "p1") == 0.0);
}

TEST_CASE("scores match a straight-line reimplementation") {
  const Corpus corpus = random_text_corpus(7, 20);
  const Bm25Index index = Bm25Index::build(corpus);
  std::mt19937_64 rng(13);
  const std::vector<std::string> vocab = {"river", "stone", "harbor", "violet", "engine",
                                          "copper", "unseen"};
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  std::uniform_int_distribution<int> qlen(1, 4);
  std::uniform_int_distribution<int> ppick(0, 19);

  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> query;
    const int len = qlen(rng);
    for (int t = 0; t < len; ++t) {
      query.push_back(vocab[word(rng)]);
    }
    const std::string pid = "p" + std::to_string(ppick(rng));
    const double got = index.score(query, pid);
    const double want = oracle_bm25(corpus, query, pid, 1.5, 0.75);
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("b -> 0 removes length normalization") {
  const Corpus corpus = random_text_corpus(21, 12);
  Bm25Params tiny_b;
  tiny_b.b = 1e-9;
  const Bm25Index index = Bm25Index::build(corpus, tiny_b);

  // reference with the normalization factor pinned to 1 (len == avglen)
  const Bm25Index plain = Bm25Index::build(corpus);
  for (int p = 0; p < 12; ++p) {
    const std::string pid = "p" + std::to_string(p);
    const double got = index.score({"river", "stone"}, pid);

    // recompute from first principles with norm = k1
    const auto terms = normalize_text(corpus.passage(pid).text());
    double want = 0.0;
    for (const std::string term : {"river", "stone"}) {
      const double tf =
          static_cast<double>(std::count(terms.begin(), terms.end(), term));
      if (tf > 0.0) {
        want += plain.idf(term) * tf * (1.5 + 1.0) / (tf + 1.5);
      }
    }
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("unknown passage is an error") {
  const Corpus corpus = random_text_corpus(3, 4);
  const Bm25Index index = Bm25Index::build(corpus);
  CHECK_THROWS_AS(index.score({"river"}, "nope"), std::out_of_range);
}

TEST_CASE("duplicated query terms contribute twice") {
  const std::string jsonl =
      evitest::doc_json("d1", {PassageSpec{"p1", {{"floyd", "music", "band"}}, {}}}).dump() +
      "\n";
  const Corpus corpus = evitest::corpus_from_jsonl(jsonl);
  const Bm25Index index = Bm25Index::build(corpus);
  CHECK(index.score({"floyd", "floyd"}, "p1") ==
        doctest::Approx(2.0 * index.score({"floyd"}, "p1")).epsilon(1e-12));
}
