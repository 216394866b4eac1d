#pragma once
// End-to-end orchestration: configuration, the per-pair retrieve pipeline
// (graph -> mining -> redemption -> ranking -> input preparation), batch
// execution over entity pairs with OpenMP, and the JSONL surfaces shared
// with external tooling.
//
// Pair-level failures are isolated: one bad pair is recorded in the run
// manifest and never aborts the batch. Output files are written to a temp
// path and renamed, so readers never observe partial files.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evipath/bm25.hpp"
#include "evipath/embedding.hpp"
#include "evipath/evaluation.hpp"
#include "evipath/jsonl.hpp"
#include "evipath/train_export.hpp"

namespace evipath {

class Corpus;

struct PipelineConfig {
  std::string store_dir;
  std::size_t max_hops = 4;        // H
  std::size_t top_k = 16;          // K
  std::size_t input_budget = 512;  // L
  std::size_t doc_cap = 50;
  std::string scorer = "bm25";     // bm25 | dense_pair | dense_sequential | random
  Bm25Params bm25;
  std::string embedding_file;
  ServiceConfig embedding_service;  // endpoint empty when unused
  std::size_t bucket_boundary = 3;
  BucketSemantics bucket_semantics = BucketSemantics::LtGe;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = library default
  bool dump_paths = false;

  static PipelineConfig from_json(const Json& json);
  static PipelineConfig from_file(const std::filesystem::path& path);
  Json to_json() const;

  // Every problem found, empty when the config is usable. Validation runs
  // before any expensive work.
  std::vector<std::string> validate() const;
};

struct EntityPair {
  std::string head;
  std::string tail;
};

// Pairs file: one {"head": str, "tail": str} per line.
std::vector<EntityPair> load_pairs(std::istream& in);

// Gold/evidence annotations: {"head", "tail", "evidence_passages",
// "evidence_paths", optional "negatives"}.
struct EvidenceRecord {
  EntityPair pair;
  std::vector<std::string> evidence_passages;
  std::vector<std::vector<std::string>> evidence_paths;
  std::vector<std::string> negatives;
};

std::vector<EvidenceRecord> load_evidence(std::istream& in);

GoldEvidence to_gold(const EvidenceRecord& record);

struct PairOutcome {
  EntityPair pair;
  std::string error;  // empty on success
  std::size_t paths_mined = 0;
  bool mining_failed = false;
  bool redemption = false;
  std::size_t multi_doc_paths = 0;  // paths spanning > 2 documents
  std::size_t ranked = 0;
  std::string ranked_file;
  std::string context_file;
  std::string paths_file;
};

struct RetrieveResult {
  std::vector<PairOutcome> outcomes;
  std::size_t failures = 0;
};

// Runs the full per-pair pipeline for every pair, parallel across pairs.
// Writes per-pair ranked/context (and optional path-dump) files plus
// manifest.jsonl into out_dir.
RetrieveResult run_retrieve(const Corpus& corpus, const PipelineConfig& config,
                            const std::vector<EntityPair>& pairs,
                            const std::filesystem::path& out_dir);

// Reads a retrieve output directory back for evaluation: pair -> ranked
// passage sequences, via the run manifest.
struct LoadedRetrieval {
  EntityPair pair;
  std::vector<std::vector<std::string>> sequences;
};

std::vector<LoadedRetrieval> load_retrieved_dir(const std::filesystem::path& dir);

// Joins gold evidence with retrieved sequences on (head, tail); gold pairs
// with no retrieval output evaluate against an empty result set.
std::vector<PairEvaluation> join_for_evaluation(
    const std::vector<EvidenceRecord>& gold,
    const std::vector<LoadedRetrieval>& retrieved);

// Builds training samples from evidence records (query template + positives
// from evidence passages, negatives as provided), applies query
// augmentation, and exports JSONL. Returns the record count.
std::size_t export_training_data(const Corpus& corpus,
                                 const std::vector<EvidenceRecord>& records,
                                 const std::filesystem::path& destination);

void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace evipath
