#pragma once
// Training-side math and export for an external dense-encoder trainer:
// multi-positive contrastive loss (for verification), query-augmentation of
// the training corpus, and deterministic JSONL export. No optimizer lives
// here; the engine only produces what a trainer consumes.

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace evipath {

struct TrainingSample {
  std::string query_text;
  std::vector<std::string> positives;  // m >= 1
  std::vector<std::string> negatives;

  bool operator==(const TrainingSample&) const = default;
};

// -sum_k log( e^{s+_k} / (e^{s+_k} + sum_j e^{s-_j}) ), stabilized by
// subtracting each term's max logit before exponentiation. sims must cover
// every positive and negative passage id.
double contrastive_loss(const TrainingSample& sample,
                        const std::map<std::string, double>& sims);

// T' = T  union  one new sample per (sample, positive index l): the query
// concatenated with positive l's text, positives minus l, negatives
// unchanged. New samples left with zero positives are dropped. Output order:
// the originals, then the augmented samples grouped per original.
std::vector<TrainingSample> augment_training_set(
    const std::vector<TrainingSample>& samples,
    const std::map<std::string, std::string>& passage_texts);

// One {"query","positives","negatives"} record per line, input order.
// Written via temp file + rename; a failed write leaves nothing behind.
std::size_t export_training_jsonl(const std::vector<TrainingSample>& samples,
                                  const std::filesystem::path& destination);

}  // namespace evipath
