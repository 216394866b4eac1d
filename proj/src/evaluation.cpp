#include "evipath/evaluation.hpp"

#include <algorithm>
#include <cstdio>

#include "evipath/jsonl.hpp"

namespace evipath {

std::string to_string(BucketSemantics semantics) {
  return semantics == BucketSemantics::LtGe ? "lt_ge" : "le_gt";
}

std::optional<double> path_recall(const std::vector<std::vector<std::string>>& retrieved,
                                  const GoldEvidence& gold) {
  if (gold.gold_paths.empty()) {
    return std::nullopt;
  }
  std::size_t hits = 0;
  for (const auto& gold_path : gold.gold_paths) {
    if (std::find(retrieved.begin(), retrieved.end(), gold_path) != retrieved.end()) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(gold.gold_paths.size());
}

std::optional<double> passage_recall(const std::vector<std::vector<std::string>>& retrieved,
                                     const GoldEvidence& gold) {
  if (gold.gold_passages.empty()) {
    return std::nullopt;
  }
  std::set<std::string> covered;
  for (const auto& path : retrieved) {
    covered.insert(path.begin(), path.end());
  }
  std::size_t hits = 0;
  for (const auto& pid : gold.gold_passages) {
    if (covered.count(pid) != 0) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(gold.gold_passages.size());
}

std::optional<double> BucketCounts::path_recall() const {
  if (path_total == 0) {
    return std::nullopt;
  }
  return static_cast<double>(path_hits) / static_cast<double>(path_total);
}

std::optional<double> BucketCounts::passage_recall() const {
  if (passage_total == 0) {
    return std::nullopt;
  }
  return static_cast<double>(passage_hits) / static_cast<double>(passage_total);
}

RecallReport bucketed_report(const std::vector<PairEvaluation>& pairs,
                             std::size_t boundary, BucketSemantics semantics) {
  RecallReport report;
  report.semantics = semantics;
  report.boundary = boundary;

  const auto is_short = [&](std::size_t hops) {
    return semantics == BucketSemantics::LtGe ? hops < boundary : hops <= boundary;
  };

  for (const auto& pair : pairs) {
    if (pair.gold.gold_paths.empty() && pair.gold.gold_passages.empty()) {
      ++report.pairs_skipped_empty_gold;
      continue;
    }
    ++report.pairs_evaluated;

    std::set<std::string> covered;
    for (const auto& path : pair.retrieved) {
      covered.insert(path.begin(), path.end());
    }

    std::set<std::string> short_passages;  // passages used by short gold paths
    for (const auto& gold_path : pair.gold.gold_paths) {
      const bool matched =
          std::find(pair.retrieved.begin(), pair.retrieved.end(), gold_path) !=
          pair.retrieved.end();
      BucketCounts& bucket =
          is_short(gold_path.size()) ? report.short_bucket : report.long_bucket;
      ++bucket.path_total;
      ++report.overall.path_total;
      if (matched) {
        ++bucket.path_hits;
        ++report.overall.path_hits;
      }
      if (is_short(gold_path.size())) {
        short_passages.insert(gold_path.begin(), gold_path.end());
      }
    }

    for (const auto& pid : pair.gold.gold_passages) {
      const bool in_short = short_passages.count(pid) != 0;
      BucketCounts& bucket = in_short ? report.short_bucket : report.long_bucket;
      ++bucket.passage_total;
      ++report.overall.passage_total;
      if (covered.count(pid) != 0) {
        ++bucket.passage_hits;
        ++report.overall.passage_hits;
      }
    }
  }
  return report;
}

namespace {

Json bucket_json(const BucketCounts& bucket) {
  Json out{{"path_hits", bucket.path_hits},
           {"path_total", bucket.path_total},
           {"passage_hits", bucket.passage_hits},
           {"passage_total", bucket.passage_total}};
  if (const auto r = bucket.path_recall()) {
    out["path_recall"] = *r;
  } else {
    out["path_recall"] = nullptr;
  }
  if (const auto r = bucket.passage_recall()) {
    out["passage_recall"] = *r;
  } else {
    out["passage_recall"] = nullptr;
  }
  return out;
}

std::string format_cell(const std::optional<double>& recall, std::size_t hits,
                        std::size_t total) {
  char buf[64];
  if (recall.has_value()) {
    std::snprintf(buf, sizeof(buf), "%6.4f (%zu/%zu)", *recall, hits, total);
  } else {
    std::snprintf(buf, sizeof(buf), "   n/a (0/0)");
  }
  return buf;
}

}  // namespace

std::string report_to_json(const RecallReport& report) {
  Json out{{"overall", bucket_json(report.overall)},
           {"short_bucket", bucket_json(report.short_bucket)},
           {"long_bucket", bucket_json(report.long_bucket)},
           {"pairs_evaluated", report.pairs_evaluated},
           {"pairs_skipped_empty_gold", report.pairs_skipped_empty_gold},
           {"bucket_semantics", to_string(report.semantics)},
           {"boundary", report.boundary}};
  return out.dump(2);
}

std::string report_to_table(const RecallReport& report) {
  const std::string short_label =
      report.semantics == BucketSemantics::LtGe
          ? "hops<" + std::to_string(report.boundary)
          : "hops<=" + std::to_string(report.boundary);
  const std::string long_label =
      report.semantics == BucketSemantics::LtGe
          ? "hops>=" + std::to_string(report.boundary)
          : "hops>" + std::to_string(report.boundary);

  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %-22s %-22s\n", "bucket", "path-recall",
                "passage-recall");
  out += line;
  const auto row = [&](const std::string& label, const BucketCounts& bucket) {
    std::snprintf(line, sizeof(line), "%-10s %-22s %-22s\n", label.c_str(),
                  format_cell(bucket.path_recall(), bucket.path_hits, bucket.path_total).c_str(),
                  format_cell(bucket.passage_recall(), bucket.passage_hits,
                              bucket.passage_total)
                      .c_str());
    out += line;
  };
  row("all", report.overall);
  row(short_label, report.short_bucket);
  row(long_label, report.long_bucket);
  return out;
}

}  // namespace evipath
