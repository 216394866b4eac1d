#pragma once
// Retrieval-quality metrics against gold evidence annotations: path-level
// recall (exact passage-sequence match), passage-level recall, and
// hop-bucketed breakdowns with configurable boundary semantics.
//
// Pairs with empty gold are undefined and excluded from aggregates rather
// than counted as perfect.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace evipath {

struct GoldEvidence {
  std::string head;
  std::string tail;
  std::vector<std::vector<std::string>> gold_paths;  // ordered passage ids
  std::set<std::string> gold_passages;               // superset of path members
};

// Hop-count bucketing of gold paths. The short bucket is hops < boundary
// (table semantics) or hops <= boundary (text semantics).
enum class BucketSemantics { LtGe, LeGt };

std::string to_string(BucketSemantics semantics);

// Fraction of gold paths matched exactly (order included) by some retrieved
// path. Empty gold -> nullopt.
std::optional<double> path_recall(const std::vector<std::vector<std::string>>& retrieved,
                                  const GoldEvidence& gold);

// Fraction of gold passages covered by retrieved paths. Empty gold -> nullopt.
std::optional<double> passage_recall(const std::vector<std::vector<std::string>>& retrieved,
                                     const GoldEvidence& gold);

struct PairEvaluation {
  GoldEvidence gold;
  std::vector<std::vector<std::string>> retrieved;
};

struct BucketCounts {
  std::size_t path_hits = 0;
  std::size_t path_total = 0;
  std::size_t passage_hits = 0;
  std::size_t passage_total = 0;

  std::optional<double> path_recall() const;
  std::optional<double> passage_recall() const;

  bool operator==(const BucketCounts&) const = default;
};

struct RecallReport {
  BucketCounts overall;
  BucketCounts short_bucket;  // below the boundary (or <= under LeGt)
  BucketCounts long_bucket;
  std::size_t pairs_evaluated = 0;
  std::size_t pairs_skipped_empty_gold = 0;
  BucketSemantics semantics = BucketSemantics::LtGe;
  std::size_t boundary = 3;
};

// Micro-averaged over gold paths across pairs. Per pair, gold passages are
// partitioned by bucket: a passage used by any short-bucket gold path counts
// as short, every remaining gold passage as long — so bucket counts always
// sum to the overall counts.
RecallReport bucketed_report(const std::vector<PairEvaluation>& pairs,
                             std::size_t boundary = 3,
                             BucketSemantics semantics = BucketSemantics::LtGe);

std::string report_to_json(const RecallReport& report);
std::string report_to_table(const RecallReport& report);

}  // namespace evipath
