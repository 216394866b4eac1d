#include <doctest.h>

#include <random>

#include "evipath/evaluation.hpp"

using namespace evipath;

namespace {

using Seq = std::vector<std::string>;

GoldEvidence gold_of(std::vector<Seq> paths, std::set<std::string> extra_passages = {}) {
  GoldEvidence gold;
  gold.head = "h";
  gold.tail = "t";
  gold.gold_paths = std::move(paths);
  gold.gold_passages = std::move(extra_passages);
  for (const auto& path : gold.gold_paths) {
    gold.gold_passages.insert(path.begin(), path.end());
  }
  return gold;
}

}  // namespace

TEST_CASE("path recall needs the exact sequence") {
  const GoldEvidence gold = gold_of({{"a", "b", "c"}});
  CHECK(path_recall({{"a", "b", "c"}}, gold) == 1.0);
  CHECK(path_recall({{"a", "b"}}, gold) == 0.0);            // prefixes do not count
  CHECK(path_recall({{"c", "b", "a"}}, gold) == 0.0);       // reversed does not count
  CHECK(path_recall({{"a", "b", "c", "d"}}, gold) == 0.0);  // superpaths do not count
  CHECK(!path_recall({}, gold_of({})).has_value());         // empty gold is undefined
}

TEST_CASE("passage recall is the covered fraction") {
  const GoldEvidence gold = gold_of({{"a", "b"}}, {"c"});
  CHECK(passage_recall({{"a", "b", "x"}}, gold) == doctest::Approx(2.0 / 3.0));
  CHECK(passage_recall({{"x", "y"}}, gold) == 0.0);
  CHECK(passage_recall({{"a", "b"}, {"c", "x"}}, gold) == 1.0);
  GoldEvidence empty;
  CHECK(!passage_recall({{"a"}}, empty).has_value());
}

TEST_CASE("recall against a set-arithmetic oracle on random fixtures") {
  std::mt19937_64 rng(321);
  std::uniform_int_distribution<int> path_len(1, 4);
  std::uniform_int_distribution<int> pid(0, 9);

  for (int trial = 0; trial < 100; ++trial) {
    const int gold_count = 1 + static_cast<int>(rng() % 10);
    std::vector<Seq> gold_paths;
    for (int g = 0; g < gold_count; ++g) {
      Seq path;
      const int len = path_len(rng);
      for (int i = 0; i < len; ++i) {
        path.push_back("p" + std::to_string(pid(rng)));
      }
      gold_paths.push_back(std::move(path));
    }
    const GoldEvidence gold = gold_of(gold_paths);

    std::vector<Seq> retrieved;
    for (const auto& path : gold_paths) {
      if (rng() % 2 == 0) {
        retrieved.push_back(path);
      }
    }
    for (int extra = static_cast<int>(rng() % 4); extra > 0; --extra) {
      Seq path;
      const int len = path_len(rng);
      for (int i = 0; i < len; ++i) {
        path.push_back("q" + std::to_string(pid(rng)));
      }
      retrieved.push_back(std::move(path));
    }

    // oracle: distinct gold paths present in retrieved / distinct gold paths
    std::set<Seq> gold_set(gold.gold_paths.begin(), gold.gold_paths.end());
    std::set<Seq> retrieved_set(retrieved.begin(), retrieved.end());
    std::size_t hits = 0;
    for (const auto& path : gold_set) {
      hits += retrieved_set.count(path);
    }
    // path_recall counts per gold-path entry, so compare on the multiset
    std::size_t entry_hits = 0;
    for (const auto& path : gold.gold_paths) {
      entry_hits += retrieved_set.count(path);
    }
    const double want_path =
        static_cast<double>(entry_hits) / static_cast<double>(gold.gold_paths.size());
    CHECK(path_recall(retrieved, gold) == doctest::Approx(want_path).epsilon(1e-12));

    std::set<std::string> covered;
    for (const auto& path : retrieved) {
      covered.insert(path.begin(), path.end());
    }
    std::size_t passage_hits = 0;
    for (const auto& p : gold.gold_passages) {
      passage_hits += covered.count(p);
    }
    const double want_passage =
        static_cast<double>(passage_hits) / static_cast<double>(gold.gold_passages.size());
    CHECK(passage_recall(retrieved, gold) == doctest::Approx(want_passage).epsilon(1e-12));
  }
}

TEST_CASE("bucketed report splits by hop count under table semantics") {
  std::vector<PairEvaluation> pairs;
  {
    PairEvaluation pair;
    pair.gold = gold_of({{"a", "b"}, {"c", "d", "e"}, {"f", "g", "h", "i"}});
    pair.retrieved = {{"a", "b"}, {"f", "g", "h", "i"}};
    pairs.push_back(pair);
  }
  {
    PairEvaluation pair;
    pair.gold = gold_of({{"x", "y"}});
    pair.retrieved = {{"x", "y"}};
    pairs.push_back(pair);
  }

  const RecallReport report = bucketed_report(pairs, 3, BucketSemantics::LtGe);
  CHECK(report.pairs_evaluated == 2);
  // short bucket (<3): [a,b], [x,y]: both hit
  CHECK(report.short_bucket.path_total == 2);
  CHECK(report.short_bucket.path_hits == 2);
  // long bucket (>=3): the 3-hop (miss) and the 4-hop (hit)
  CHECK(report.long_bucket.path_total == 2);
  CHECK(report.long_bucket.path_hits == 1);
  CHECK(report.overall.path_total == 4);
  CHECK(report.overall.path_hits == 3);
}

TEST_CASE("empty buckets report undefined recalls") {
  PairEvaluation pair;
  pair.gold = gold_of({{"a", "b"}});
  pair.retrieved = {{"a", "b"}};
  const RecallReport report = bucketed_report({pair}, 3, BucketSemantics::LtGe);
  CHECK(report.long_bucket.path_total == 0);
  CHECK(!report.long_bucket.path_recall().has_value());
  CHECK(report.short_bucket.path_recall() == 1.0);
  const std::string table = report_to_table(report);
  CHECK(table.find("n/a") != std::string::npos);
}

TEST_CASE("flipping boundary semantics moves 3-hop paths and conserves totals") {
  std::vector<PairEvaluation> pairs;
  PairEvaluation pair;
  pair.gold = gold_of({{"a", "b"}, {"c", "d", "e"}, {"f", "g", "h", "i"}});
  pair.retrieved = {{"c", "d", "e"}};
  pairs.push_back(pair);

  const RecallReport lt_ge = bucketed_report(pairs, 3, BucketSemantics::LtGe);
  const RecallReport le_gt = bucketed_report(pairs, 3, BucketSemantics::LeGt);

  // 3-hop gold sits in the long bucket under lt_ge, short under le_gt
  CHECK(lt_ge.short_bucket.path_total == 1);
  CHECK(lt_ge.long_bucket.path_total == 2);
  CHECK(le_gt.short_bucket.path_total == 2);
  CHECK(le_gt.long_bucket.path_total == 1);

  for (const RecallReport* report : {&lt_ge, &le_gt}) {
    CHECK(report->short_bucket.path_total + report->long_bucket.path_total ==
          report->overall.path_total);
    CHECK(report->short_bucket.path_hits + report->long_bucket.path_hits ==
          report->overall.path_hits);
    CHECK(report->short_bucket.passage_total + report->long_bucket.passage_total ==
          report->overall.passage_total);
    CHECK(report->short_bucket.passage_hits + report->long_bucket.passage_hits ==
          report->overall.passage_hits);
  }
}

TEST_CASE("bucket conservation holds on random fixtures under both semantics") {
  std::mt19937_64 rng(654);
  std::uniform_int_distribution<int> path_len(1, 5);
  std::uniform_int_distribution<int> pid(0, 14);

  std::vector<PairEvaluation> pairs;
  for (int p = 0; p < 25; ++p) {
    PairEvaluation pair;
    std::vector<Seq> gold_paths;
    for (int g = static_cast<int>(rng() % 5); g > 0; --g) {
      Seq path;
      for (int i = path_len(rng); i > 0; --i) {
        path.push_back("p" + std::to_string(pid(rng)));
      }
      gold_paths.push_back(path);
      if (rng() % 2 == 0) {
        pair.retrieved.push_back(path);
      }
    }
    std::set<std::string> extras;
    for (int e = static_cast<int>(rng() % 3); e > 0; --e) {
      extras.insert("x" + std::to_string(pid(rng)));
    }
    pair.gold = gold_of(gold_paths, extras);
    pairs.push_back(pair);
  }

  for (const BucketSemantics semantics : {BucketSemantics::LtGe, BucketSemantics::LeGt}) {
    const RecallReport report = bucketed_report(pairs, 3, semantics);
    CHECK(report.short_bucket.path_total + report.long_bucket.path_total ==
          report.overall.path_total);
    CHECK(report.short_bucket.path_hits + report.long_bucket.path_hits ==
          report.overall.path_hits);
    CHECK(report.short_bucket.passage_total + report.long_bucket.passage_total ==
          report.overall.passage_total);
    CHECK(report.short_bucket.passage_hits + report.long_bucket.passage_hits ==
          report.overall.passage_hits);
  }
}

TEST_CASE("adding retrieved paths never decreases recall") {
  std::mt19937_64 rng(987);
  PairEvaluation pair;
  pair.gold = gold_of({{"a", "b"}, {"c", "d", "e"}, {"f"}});

  std::vector<Seq> pool = {{"a", "b"}, {"c", "d", "e"}, {"f"}, {"x", "y"}, {"a", "z"}};
  double last_path = 0.0;
  double last_passage = 0.0;
  for (const auto& addition : pool) {
    pair.retrieved.push_back(addition);
    const double p = *path_recall(pair.retrieved, pair.gold);
    const double q = *passage_recall(pair.retrieved, pair.gold);
    CHECK(p >= last_path);
    CHECK(q >= last_passage);
    last_path = p;
    last_passage = q;
  }
}

TEST_CASE("full path matches imply their passages are recalled") {
  const GoldEvidence gold = gold_of({{"a", "b"}, {"c", "d"}});
  const std::vector<Seq> retrieved = {{"a", "b"}};
  // fraction of gold passages covered by matched gold paths
  const double dominated = 2.0 / 4.0;
  CHECK(*passage_recall(retrieved, gold) >= dominated);
}

TEST_CASE("empty-gold pairs are excluded from aggregates") {
  PairEvaluation empty;
  PairEvaluation real;
  real.gold = gold_of({{"a"}});
  real.retrieved = {{"a"}};
  const RecallReport report = bucketed_report({empty, real}, 3, BucketSemantics::LtGe);
  CHECK(report.pairs_evaluated == 1);
  CHECK(report.pairs_skipped_empty_gold == 1);
  CHECK(report.overall.path_recall() == 1.0);
}

TEST_CASE("report serializations carry the semantics that produced them") {
  PairEvaluation pair;
  pair.gold = gold_of({{"a", "b", "c"}});
  pair.retrieved = {{"a", "b", "c"}};
  const RecallReport report = bucketed_report({pair}, 3, BucketSemantics::LeGt);
  const std::string json = report_to_json(report);
  CHECK(json.find("\"bucket_semantics\": \"le_gt\"") != std::string::npos);
  const std::string table = report_to_table(report);
  CHECK(table.find("hops<=3") != std::string::npos);
}
