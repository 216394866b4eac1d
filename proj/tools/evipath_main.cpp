// evipath — multi-hop evidence retrieval between entity pairs over an
// entity-annotated corpus. Subcommands: ingest, retrieve, evaluate,
// export-training, dump-graph.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "evipath/corpus.hpp"
#include "evipath/graph.hpp"
#include "evipath/pipeline.hpp"

namespace {

using namespace evipath;

struct ConfigCli {
  std::string config_file;
  std::optional<std::string> store_dir;
  std::optional<std::size_t> max_hops;
  std::optional<std::size_t> top_k;
  std::optional<std::size_t> input_budget;
  std::optional<std::size_t> doc_cap;
  std::optional<std::string> scorer;
  std::optional<double> bm25_k1;
  std::optional<double> bm25_b;
  std::optional<std::string> embedding_file;
  std::optional<std::string> embedding_endpoint;
  std::optional<std::string> bucket_semantics;
  std::optional<std::size_t> bucket_boundary;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "JSON configuration file");
    app->add_option("--store", store_dir, "corpus store directory");
    app->add_option("--max-hops,-H", max_hops, "maximum passages per path");
    app->add_option("--top-k,-K", top_k, "ranked paths kept per pair");
    app->add_option("--budget,-L", input_budget, "prepared-context token budget");
    app->add_option("--doc-cap", doc_cap, "per-entity document cap");
    app->add_option("--scorer", scorer, "bm25 | dense_pair | dense_sequential | random");
    app->add_option("--k1", bm25_k1, "BM25 k1");
    app->add_option("--b", bm25_b, "BM25 b");
    app->add_option("--embedding-file", embedding_file, "embedding table file");
    app->add_option("--embedding-endpoint", embedding_endpoint, "embedding service endpoint");
    app->add_option("--bucket-semantics", bucket_semantics, "lt_ge | le_gt");
    app->add_option("--bucket-boundary", bucket_boundary, "hop bucket boundary");
    app->add_option("--seed", seed, "random scorer seed");
    app->add_option("--workers", workers, "pair-level worker count (0 = auto)");
  }

  // Config file first, then flag overrides, then the environment override
  // for the embedding endpoint.
  PipelineConfig resolve() const {
    PipelineConfig config;
    if (!config_file.empty()) {
      config = PipelineConfig::from_file(config_file);
    }
    if (store_dir) config.store_dir = *store_dir;
    if (max_hops) config.max_hops = *max_hops;
    if (top_k) config.top_k = *top_k;
    if (input_budget) config.input_budget = *input_budget;
    if (doc_cap) config.doc_cap = *doc_cap;
    if (scorer) config.scorer = *scorer;
    if (bm25_k1) config.bm25.k1 = *bm25_k1;
    if (bm25_b) config.bm25.b = *bm25_b;
    if (embedding_file) config.embedding_file = *embedding_file;
    if (embedding_endpoint) config.embedding_service.endpoint = *embedding_endpoint;
    if (bucket_semantics) {
      config.bucket_semantics =
          *bucket_semantics == "le_gt" ? BucketSemantics::LeGt : BucketSemantics::LtGe;
    }
    if (bucket_boundary) config.bucket_boundary = *bucket_boundary;
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    if (const char* endpoint = std::getenv("EVIPATH_EMBEDDING_ENDPOINT")) {
      config.embedding_service.endpoint = endpoint;
    }
    return config;
  }
};

int fail(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 1;
}

int validate_or_fail(const PipelineConfig& config, bool need_store) {
  std::vector<std::string> problems = config.validate();
  if (need_store && config.store_dir.empty()) {
    problems.insert(problems.begin(), "no corpus store configured (--store)");
  }
  if (problems.empty()) {
    return 0;
  }
  std::cerr << "error: invalid configuration:\n";
  for (const auto& p : problems) {
    std::cerr << "  - " << p << "\n";
  }
  return 1;
}

int cmd_ingest(const ConfigCli& cli, const std::string& corpus_file,
               const std::string& entities_file, bool reject_unknown, bool force) {
  PipelineConfig config = cli.resolve();
  if (config.store_dir.empty()) {
    return fail("no store directory configured (--store)");
  }
  if (!force && std::filesystem::exists(std::filesystem::path(config.store_dir) / "manifest.json")) {
    return fail("store " + config.store_dir + " already exists; pass --force to overwrite");
  }

  std::ifstream corpus_in(corpus_file);
  if (!corpus_in) {
    return fail("cannot open corpus file " + corpus_file);
  }
  std::ifstream entities_in;
  std::istream* entities_ptr = nullptr;
  if (!entities_file.empty()) {
    entities_in.open(entities_file);
    if (!entities_in) {
      return fail("cannot open entity vocabulary " + entities_file);
    }
    entities_ptr = &entities_in;
  }

  IngestOptions options;
  options.unknown_entities =
      reject_unknown ? UnknownEntityPolicy::Reject : UnknownEntityPolicy::AutoRegister;
  try {
    const Corpus corpus = Corpus::ingest(corpus_in, entities_ptr, options);
    corpus.save(config.store_dir);
    const CorpusStats& stats = corpus.stats();
    std::cout << "ingested documents=" << stats.documents << " passages=" << stats.passages
              << " mentions=" << stats.mentions << " entities=" << stats.entities << "\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(std::string("ingestion failed: ") + e.what());
  }
}

int cmd_retrieve(const ConfigCli& cli, const std::string& pairs_file,
                 const std::string& out_dir, bool dump_paths) {
  PipelineConfig config = cli.resolve();
  config.dump_paths = config.dump_paths || dump_paths;
  if (const int rc = validate_or_fail(config, true); rc != 0) {
    return rc;
  }
  try {
    const Corpus corpus = Corpus::load(config.store_dir);
    std::ifstream pairs_in(pairs_file);
    if (!pairs_in) {
      return fail("cannot open pairs file " + pairs_file);
    }
    const std::vector<EntityPair> pairs = load_pairs(pairs_in);
    const RetrieveResult result = run_retrieve(corpus, config, pairs, out_dir);
    std::size_t redemptions = 0;
    for (const auto& outcome : result.outcomes) {
      if (outcome.error.empty() && outcome.redemption) {
        ++redemptions;
      }
      if (!outcome.error.empty()) {
        std::cerr << "pair (" << outcome.pair.head << ", " << outcome.pair.tail
                  << ") failed: " << outcome.error << "\n";
      }
    }
    std::cout << "retrieved pairs=" << pairs.size() << " failures=" << result.failures
              << " redemptions=" << redemptions << " out=" << out_dir << "\n";
    return result.failures == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_evaluate(const ConfigCli& cli, const std::string& retrieved_dir,
                 const std::string& gold_file, const std::string& report_file) {
  const PipelineConfig config = cli.resolve();
  try {
    std::ifstream gold_in(gold_file);
    if (!gold_in) {
      return fail("cannot open gold file " + gold_file);
    }
    const auto gold = load_evidence(gold_in);
    const auto retrieved = load_retrieved_dir(retrieved_dir);
    const auto evaluations = join_for_evaluation(gold, retrieved);
    const RecallReport report =
        bucketed_report(evaluations, config.bucket_boundary, config.bucket_semantics);
    std::cout << report_to_table(report);
    if (!report_file.empty()) {
      write_atomic(report_file, report_to_json(report) + "\n");
      std::cout << "report written to " << report_file << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_export_training(const ConfigCli& cli, const std::string& gold_file,
                        const std::string& out_file) {
  const PipelineConfig config = cli.resolve();
  if (config.store_dir.empty()) {
    return fail("no store directory configured (--store)");
  }
  try {
    const Corpus corpus = Corpus::load(config.store_dir);
    std::ifstream gold_in(gold_file);
    if (!gold_in) {
      return fail("cannot open gold file " + gold_file);
    }
    const auto records = load_evidence(gold_in);
    const std::size_t count = export_training_data(corpus, records, out_file);
    std::cout << "exported " << count << " training records to " << out_file << "\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int cmd_dump_graph(const ConfigCli& cli, const std::string& head, const std::string& tail,
                   const std::string& out_file) {
  const PipelineConfig config = cli.resolve();
  if (config.store_dir.empty()) {
    return fail("no store directory configured (--store)");
  }
  try {
    const Corpus corpus = Corpus::load(config.store_dir);
    const PassageGraph graph = build_graph(corpus, head, tail, config.doc_cap);
    std::string out;
    for (const auto& [p, q, entity] : graph.edge_list()) {
      out += p;
      out += '\t';
      out += q;
      out += '\t';
      out += entity;
      out += '\n';
    }
    if (out_file.empty()) {
      std::cout << out;
    } else {
      write_atomic(out_file, out);
    }
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-hop evidence path retrieval engine"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "ingest a corpus into a persistent store");
  ConfigCli ingest_cli;
  ingest_cli.attach(ingest);
  std::string corpus_file;
  std::string entities_file;
  bool reject_unknown = false;
  bool force = false;
  ingest->add_option("--corpus", corpus_file, "corpus JSONL file")->required();
  ingest->add_option("--entities", entities_file, "entity vocabulary JSONL file");
  ingest->add_flag("--reject-unknown-entities", reject_unknown,
                   "reject mentions of entities missing from the vocabulary");
  ingest->add_flag("--force", force, "overwrite an existing store");

  // retrieve
  auto* retrieve = app.add_subcommand("retrieve", "mine, rank, and prepare evidence paths");
  ConfigCli retrieve_cli;
  retrieve_cli.attach(retrieve);
  std::string pairs_file;
  std::string out_dir;
  bool dump_paths = false;
  retrieve->add_option("--pairs", pairs_file, "entity pairs JSONL file")->required();
  retrieve->add_option("--out", out_dir, "output directory")->required();
  retrieve->add_flag("--dump-paths", dump_paths, "also write every mined path per pair");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "recall metrics against gold evidence");
  ConfigCli evaluate_cli;
  evaluate_cli.attach(evaluate);
  std::string retrieved_dir;
  std::string gold_file;
  std::string report_file;
  evaluate->add_option("--retrieved", retrieved_dir, "retrieve output directory")->required();
  evaluate->add_option("--gold", gold_file, "gold evidence JSONL file")->required();
  evaluate->add_option("--report", report_file, "also write the report as JSON");

  // export-training
  auto* export_training =
      app.add_subcommand("export-training", "build and export augmented training samples");
  ConfigCli export_cli;
  export_cli.attach(export_training);
  std::string export_gold;
  std::string export_out;
  export_training->add_option("--gold", export_gold, "gold evidence JSONL file")->required();
  export_training->add_option("--out", export_out, "output JSONL file")->required();

  // dump-graph
  auto* dump_graph = app.add_subcommand("dump-graph", "write the passage graph edge list");
  ConfigCli dump_cli;
  dump_cli.attach(dump_graph);
  std::string head;
  std::string tail;
  std::string graph_out;
  dump_graph->add_option("--head", head, "head entity id")->required();
  dump_graph->add_option("--tail", tail, "tail entity id")->required();
  dump_graph->add_option("--out", graph_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (ingest->parsed()) {
    return cmd_ingest(ingest_cli, corpus_file, entities_file, reject_unknown, force);
  }
  if (retrieve->parsed()) {
    return cmd_retrieve(retrieve_cli, pairs_file, out_dir, dump_paths);
  }
  if (evaluate->parsed()) {
    return cmd_evaluate(evaluate_cli, retrieved_dir, gold_file, report_file);
  }
  if (export_training->parsed()) {
    return cmd_export_training(export_cli, export_gold, export_out);
  }
  if (dump_graph->parsed()) {
    return cmd_dump_graph(dump_cli, head, tail, graph_out);
  }
  return 1;
}
