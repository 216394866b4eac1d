#include "evipath/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <set>

#include "evipath/corpus.hpp"
#include "evipath/graph.hpp"
#include "evipath/input_prep.hpp"
#include "evipath/mining.hpp"
#include "evipath/scoring.hpp"

namespace evipath {

// ---------------------------------------------------------------------------
// Configuration

PipelineConfig PipelineConfig::from_json(const Json& json) {
  PipelineConfig config;
  config.store_dir = json.value("store_dir", config.store_dir);
  config.max_hops = json.value("max_hops", config.max_hops);
  config.top_k = json.value("top_k", config.top_k);
  config.input_budget = json.value("input_budget", config.input_budget);
  config.doc_cap = json.value("doc_cap", config.doc_cap);
  config.scorer = json.value("scorer", config.scorer);
  if (json.contains("bm25")) {
    config.bm25.k1 = json["bm25"].value("k1", config.bm25.k1);
    config.bm25.b = json["bm25"].value("b", config.bm25.b);
  }
  if (json.contains("embedding")) {
    const Json& emb = json["embedding"];
    config.embedding_file = emb.value("file", config.embedding_file);
    config.embedding_service.endpoint = emb.value("endpoint", config.embedding_service.endpoint);
    config.embedding_service.timeout_ms = emb.value("timeout_ms", config.embedding_service.timeout_ms);
    config.embedding_service.max_attempts = emb.value("max_attempts", config.embedding_service.max_attempts);
    config.embedding_service.backoff_ms = emb.value("backoff_ms", config.embedding_service.backoff_ms);
    config.embedding_service.batch_size = emb.value("batch_size", config.embedding_service.batch_size);
  }
  config.bucket_boundary = json.value("bucket_boundary", config.bucket_boundary);
  const std::string semantics = json.value("bucket_semantics", std::string("lt_ge"));
  config.bucket_semantics =
      semantics == "le_gt" ? BucketSemantics::LeGt : BucketSemantics::LtGe;
  config.seed = json.value("seed", config.seed);
  config.workers = json.value("workers", config.workers);
  config.dump_paths = json.value("dump_paths", config.dump_paths);
  return config;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file " + path.string());
  }
  Json json;
  try {
    in >> json;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  return from_json(json);
}

Json PipelineConfig::to_json() const {
  Json emb = Json::object();
  if (!embedding_file.empty()) {
    emb["file"] = embedding_file;
  }
  if (!embedding_service.endpoint.empty()) {
    emb["endpoint"] = embedding_service.endpoint;
    emb["timeout_ms"] = embedding_service.timeout_ms;
    emb["max_attempts"] = embedding_service.max_attempts;
    emb["backoff_ms"] = embedding_service.backoff_ms;
    emb["batch_size"] = embedding_service.batch_size;
  }
  return Json{{"store_dir", store_dir},
              {"max_hops", max_hops},
              {"top_k", top_k},
              {"input_budget", input_budget},
              {"doc_cap", doc_cap},
              {"scorer", scorer},
              {"bm25", {{"k1", bm25.k1}, {"b", bm25.b}}},
              {"embedding", std::move(emb)},
              {"bucket_boundary", bucket_boundary},
              {"bucket_semantics", to_string(bucket_semantics)},
              {"seed", seed},
              {"workers", workers},
              {"dump_paths", dump_paths}};
}

std::vector<std::string> PipelineConfig::validate() const {
  std::vector<std::string> problems;
  if (max_hops < 1) {
    problems.push_back("max_hops must be >= 1");
  }
  if (top_k < 1) {
    problems.push_back("top_k must be >= 1");
  }
  if (input_budget < 1) {
    problems.push_back("input_budget must be >= 1");
  }
  if (doc_cap < 1) {
    problems.push_back("doc_cap must be >= 1");
  }
  static const std::set<std::string> kScorers{"bm25", "dense_pair", "dense_sequential",
                                              "random"};
  if (kScorers.count(scorer) == 0) {
    problems.push_back("unknown scorer \"" + scorer +
                       "\" (expected bm25, dense_pair, dense_sequential, or random)");
  }
  if (scorer == "bm25") {
    if (bm25.k1 < 0.0) {
      problems.push_back("bm25.k1 must be >= 0");
    }
    if (bm25.b < 0.0 || bm25.b > 1.0) {
      problems.push_back("bm25.b must lie in [0, 1]");
    }
  }
  const bool dense = scorer == "dense_pair" || scorer == "dense_sequential";
  if (dense && embedding_file.empty() && embedding_service.endpoint.empty()) {
    problems.push_back("scorer \"" + scorer +
                       "\" needs an embedding source (embedding.file or embedding.endpoint)");
  }
  if (!embedding_file.empty() && !embedding_service.endpoint.empty()) {
    problems.push_back("embedding.file and embedding.endpoint are mutually exclusive");
  }
  if (!embedding_service.endpoint.empty()) {
    if (embedding_service.max_attempts < 1) {
      problems.push_back("embedding.max_attempts must be >= 1");
    }
    if (embedding_service.batch_size < 1) {
      problems.push_back("embedding.batch_size must be >= 1");
    }
  }
  if (workers < 0) {
    problems.push_back("workers must be >= 0");
  }
  return problems;
}

// ---------------------------------------------------------------------------
// Input surfaces

std::vector<EntityPair> load_pairs(std::istream& in) {
  std::vector<EntityPair> pairs;
  for_each_jsonl(in, [&](std::size_t, const Json& record) {
    pairs.push_back({require_string(record, "head", ""), require_string(record, "tail", "")});
  });
  return pairs;
}

std::vector<EvidenceRecord> load_evidence(std::istream& in) {
  std::vector<EvidenceRecord> records;
  for_each_jsonl(in, [&](std::size_t, const Json& record) {
    EvidenceRecord ev;
    ev.pair = {require_string(record, "head", ""), require_string(record, "tail", "")};
    const Json& passages = require_field(record, "evidence_passages", "");
    if (!passages.is_array()) {
      throw std::runtime_error("evidence_passages: expected array");
    }
    for (const auto& pid : passages) {
      ev.evidence_passages.push_back(pid.get<std::string>());
    }
    const Json& paths = require_field(record, "evidence_paths", "");
    if (!paths.is_array()) {
      throw std::runtime_error("evidence_paths: expected array of arrays");
    }
    for (const auto& path : paths) {
      if (!path.is_array()) {
        throw std::runtime_error("evidence_paths: expected array of arrays");
      }
      std::vector<std::string> sequence;
      for (const auto& pid : path) {
        sequence.push_back(pid.get<std::string>());
      }
      ev.evidence_paths.push_back(std::move(sequence));
    }
    if (record.contains("negatives")) {
      for (const auto& pid : record["negatives"]) {
        ev.negatives.push_back(pid.get<std::string>());
      }
    }
    records.push_back(std::move(ev));
  });
  return records;
}

GoldEvidence to_gold(const EvidenceRecord& record) {
  GoldEvidence gold;
  gold.head = record.pair.head;
  gold.tail = record.pair.tail;
  gold.gold_paths = record.evidence_paths;
  gold.gold_passages.insert(record.evidence_passages.begin(), record.evidence_passages.end());
  for (const auto& path : record.evidence_paths) {
    gold.gold_passages.insert(path.begin(), path.end());
  }
  return gold;
}

// ---------------------------------------------------------------------------
// Retrieval batch

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out << contents;
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::string sanitize_for_filename(const std::string& raw) {
  std::string out;
  for (const char c : raw) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || c == '-' || c == '.' || c == '_') {
      out.push_back(c);
    } else {
      out.push_back('_');
    }
    if (out.size() >= 32) {
      break;
    }
  }
  return out.empty() ? "_" : out;
}

std::string pair_stem(std::size_t index, const EntityPair& pair) {
  char idx[16];
  std::snprintf(idx, sizeof(idx), "%05zu", index);
  return std::string(idx) + "__" + sanitize_for_filename(pair.head) + "__" +
         sanitize_for_filename(pair.tail);
}

std::uint64_t fnv1a64(const std::string& data, std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (const char c : data) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string ranked_to_jsonl(const std::vector<ScoredPath>& ranked) {
  std::string out;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    out += Json{{"rank", i + 1},
                {"score", ranked[i].score},
                {"passages", ranked[i].path.passages},
                {"bridges", ranked[i].path.bridges},
                {"scorer", ranked[i].scorer_id}}
               .dump();
    out += '\n';
  }
  return out;
}

std::string contexts_to_jsonl(const std::vector<ScoredPath>& ranked,
                              const std::vector<PreparedContext>& contexts) {
  std::string out;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    Json dropped = Json::array();
    for (const auto& ref : contexts[i].dropped_sentences) {
      dropped.push_back({ref.passage_id, ref.sentence_idx});
    }
    out += Json{{"tokens", contexts[i].tokens},
                {"path", ranked[i].path.passages},
                {"dropped", std::move(dropped)},
                {"truncated", contexts[i].truncated}}
               .dump();
    out += '\n';
  }
  return out;
}

std::string paths_to_jsonl(const std::vector<EvidencePath>& paths) {
  std::string out;
  for (const auto& path : paths) {
    out += Json{{"passages", path.passages},
                {"bridges", path.bridges},
                {"redemption", path.redemption}}
               .dump();
    out += '\n';
  }
  return out;
}

}  // namespace

RetrieveResult run_retrieve(const Corpus& corpus, const PipelineConfig& config,
                            const std::vector<EntityPair>& pairs,
                            const std::filesystem::path& out_dir) {
  {
    const auto problems = config.validate();
    if (!problems.empty()) {
      std::string joined = "invalid configuration:";
      for (const auto& p : problems) {
        joined += "\n  - " + p;
      }
      throw std::runtime_error(joined);
    }
  }
  std::filesystem::create_directories(out_dir);

  // Shared immutable scorer backends.
  std::optional<Bm25Index> bm25_index;
  if (config.scorer == "bm25") {
    bm25_index.emplace(Bm25Index::build(corpus, config.bm25));
  }
  std::unique_ptr<EmbeddingProvider> embeddings;
  if (config.scorer == "dense_pair" || config.scorer == "dense_sequential") {
    if (!config.embedding_file.empty()) {
      embeddings = std::make_unique<EmbeddingTable>(EmbeddingTable::load(config.embedding_file));
    } else {
      embeddings = std::make_unique<ServiceEmbeddingProvider>(
          config.embedding_service,
          [&corpus](const std::string& pid) { return corpus.passage(pid).text(); });
    }
  }

  RetrieveResult result;
  result.outcomes.resize(pairs.size());

  const auto n = static_cast<std::int64_t>(pairs.size());
  const int nthreads = config.workers > 0 ? config.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (std::int64_t i = 0; i < n; ++i) {
    PairOutcome& outcome = result.outcomes[i];
    outcome.pair = pairs[i];
    try {
      const PassageGraph graph =
          build_graph(corpus, pairs[i].head, pairs[i].tail, config.doc_cap);
      MiningReport report = mine_paths(graph, config.max_hops);
      if (report.failed) {
        report.paths = redeem(corpus, pairs[i].head, pairs[i].tail);
        if (!report.paths.empty()) {
          report.redemption_used = Redemption::HeadTailPassages;
        }
      }
      outcome.paths_mined = report.paths.size();
      outcome.mining_failed = report.failed;
      outcome.redemption = report.redemption_used != Redemption::None;
      outcome.multi_doc_paths = report.stats.multi_doc_paths;

      const Query query =
          render_query(corpus.entity(pairs[i].head), corpus.entity(pairs[i].tail));
      std::unique_ptr<PathScorer> scorer;
      if (config.scorer == "bm25") {
        scorer = std::make_unique<Bm25PathScorer>(query, *bm25_index);
      } else if (config.scorer == "dense_pair") {
        scorer = std::make_unique<DensePairScorer>(query, *embeddings);
      } else if (config.scorer == "dense_sequential") {
        scorer = std::make_unique<DenseSequentialScorer>(query, *embeddings, corpus);
      } else {
        // Per-pair seed: mixes the run seed with the pair identity so batch
        // composition and ordering cannot change a pair's shuffle.
        const std::uint64_t pair_seed =
            fnv1a64(pairs[i].tail, fnv1a64(pairs[i].head) ^ config.seed);
        scorer = std::make_unique<RandomPathScorer>(pair_seed);
      }

      const std::vector<ScoredPath> ranked =
          rank_paths(report.paths, *scorer, config.top_k);
      outcome.ranked = ranked.size();

      std::vector<PreparedContext> contexts;
      contexts.reserve(ranked.size());
      for (const auto& scored : ranked) {
        contexts.push_back(prepare_input(scored.path, corpus, config.input_budget,
                                         pairs[i].head, pairs[i].tail));
      }

      const std::string stem = pair_stem(static_cast<std::size_t>(i), pairs[i]);
      outcome.ranked_file = stem + ".ranked.jsonl";
      outcome.context_file = stem + ".context.jsonl";
      write_atomic(out_dir / outcome.ranked_file, ranked_to_jsonl(ranked));
      write_atomic(out_dir / outcome.context_file, contexts_to_jsonl(ranked, contexts));
      if (config.dump_paths) {
        outcome.paths_file = stem + ".paths.jsonl";
        write_atomic(out_dir / outcome.paths_file, paths_to_jsonl(report.paths));
      }
    } catch (const std::exception& e) {
      outcome.error = e.what();
    }
  }

  std::string manifest;
  for (std::size_t i = 0; i < result.outcomes.size(); ++i) {
    const PairOutcome& outcome = result.outcomes[i];
    Json record{{"index", i},
                {"head", outcome.pair.head},
                {"tail", outcome.pair.tail},
                {"status", outcome.error.empty() ? "ok" : "error"}};
    if (outcome.error.empty()) {
      record["paths_mined"] = outcome.paths_mined;
      record["mining_failed"] = outcome.mining_failed;
      record["redemption"] = outcome.redemption;
      record["multi_doc_paths"] = outcome.multi_doc_paths;
      record["ranked"] = outcome.ranked;
      record["ranked_file"] = outcome.ranked_file;
      record["context_file"] = outcome.context_file;
      if (!outcome.paths_file.empty()) {
        record["paths_file"] = outcome.paths_file;
      }
    } else {
      record["error"] = outcome.error;
      ++result.failures;
    }
    manifest += record.dump();
    manifest += '\n';
  }
  write_atomic(out_dir / "manifest.jsonl", manifest);
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation plumbing

std::vector<LoadedRetrieval> load_retrieved_dir(const std::filesystem::path& dir) {
  std::ifstream manifest(dir / "manifest.jsonl");
  if (!manifest) {
    throw std::runtime_error("no run manifest at " + (dir / "manifest.jsonl").string());
  }
  std::vector<LoadedRetrieval> loaded;
  for_each_jsonl(manifest, [&](std::size_t, const Json& record) {
    if (record.value("status", "") != "ok") {
      return;
    }
    LoadedRetrieval entry;
    entry.pair = {require_string(record, "head", ""), require_string(record, "tail", "")};
    const std::string ranked_file = require_string(record, "ranked_file", "");
    std::ifstream ranked(dir / ranked_file);
    if (!ranked) {
      throw std::runtime_error("manifest references missing file " + ranked_file);
    }
    for_each_jsonl(ranked, [&](std::size_t, const Json& row) {
      std::vector<std::string> sequence;
      for (const auto& pid : require_field(row, "passages", "")) {
        sequence.push_back(pid.get<std::string>());
      }
      entry.sequences.push_back(std::move(sequence));
    });
    loaded.push_back(std::move(entry));
  });
  return loaded;
}

std::vector<PairEvaluation> join_for_evaluation(
    const std::vector<EvidenceRecord>& gold,
    const std::vector<LoadedRetrieval>& retrieved) {
  std::map<std::pair<std::string, std::string>, const LoadedRetrieval*> by_pair;
  for (const auto& entry : retrieved) {
    by_pair[{entry.pair.head, entry.pair.tail}] = &entry;
  }
  std::vector<PairEvaluation> evaluations;
  evaluations.reserve(gold.size());
  for (const auto& record : gold) {
    PairEvaluation evaluation;
    evaluation.gold = to_gold(record);
    const auto it = by_pair.find({record.pair.head, record.pair.tail});
    if (it != by_pair.end()) {
      evaluation.retrieved = it->second->sequences;
    }
    evaluations.push_back(std::move(evaluation));
  }
  return evaluations;
}

// ---------------------------------------------------------------------------
// Training export

std::size_t export_training_data(const Corpus& corpus,
                                 const std::vector<EvidenceRecord>& records,
                                 const std::filesystem::path& destination) {
  std::vector<TrainingSample> samples;
  std::map<std::string, std::string> passage_texts;
  for (const auto& record : records) {
    if (record.evidence_passages.empty()) {
      continue;  // a usable sample needs at least one positive
    }
    TrainingSample sample;
    sample.query_text =
        render_query(corpus.entity(record.pair.head), corpus.entity(record.pair.tail)).text;
    sample.positives = record.evidence_passages;
    sample.negatives = record.negatives;
    for (const auto& pid : record.evidence_passages) {
      passage_texts.emplace(pid, corpus.passage(pid).text());
    }
    samples.push_back(std::move(sample));
  }
  const auto augmented = augment_training_set(samples, passage_texts);
  return export_training_jsonl(augmented, destination);
}

}  // namespace evipath
