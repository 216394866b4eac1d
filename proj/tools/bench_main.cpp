// Throughput comparison of the serial reference kernels against the OpenMP
// ones: batch path scoring, and the pair-level retrieve pipeline. Results
// must match exactly; the benchmark aborts if they diverge.

#include <omp.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>

#include "evipath/corpus.hpp"
#include "evipath/embedding.hpp"
#include "evipath/mining.hpp"
#include "evipath/pipeline.hpp"
#include "evipath/scoring.hpp"

using namespace evipath;

namespace {

// Synthetic corpus: `docs` documents of `passages_per_doc` passages, every
// passage mentioning a few entities from a shared pool plus the pair anchors.
std::string synthetic_corpus_jsonl(std::size_t docs, std::size_t passages_per_doc,
                                   std::size_t entity_pool, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> entity_dist(0, entity_pool - 1);
  std::ostringstream out;
  for (std::size_t d = 0; d < docs; ++d) {
    Json passages = Json::array();
    for (std::size_t p = 0; p < passages_per_doc; ++p) {
      Json sentences = Json::array();
      Json mentions = Json::array();
      for (int s = 0; s < 3; ++s) {
        Json sentence = Json::array();
        for (int t = 0; t < 8; ++t) {
          sentence.push_back("tok" + std::to_string(rng() % 500));
        }
        sentences.push_back(sentence);
        const std::string entity = d == 0 && p == 0 && s == 0
                                       ? "head"
                                       : (d == 1 && p == 0 && s == 0
                                              ? "tail"
                                              : "e" + std::to_string(entity_dist(rng)));
        mentions.push_back({{"entity", entity}, {"sentence", s}, {"start", 0}, {"end", 2}});
      }
      passages.push_back({{"id", "d" + std::to_string(d) + "p" + std::to_string(p)},
                          {"sentences", sentences},
                          {"mentions", mentions}});
    }
    out << Json{{"id", "d" + std::to_string(d)},
                {"title", "doc " + std::to_string(d)},
                {"passages", passages}}
               .dump()
        << "\n";
  }
  return out.str();
}

double now() { return omp_get_wtime(); }

void bench_scoring(const Corpus& corpus, int repeats) {
  // Candidate paths over random passages, scored densely.
  std::vector<std::string> passage_ids;
  for (const auto& doc : corpus.documents()) {
    for (const auto& passage : doc.passages) {
      passage_ids.push_back(passage.id);
    }
  }
  const std::size_t dim = 256;
  std::mt19937_64 rng(7);
  std::normal_distribution<float> coord(0.0f, 1.0f);
  EmbeddingTable table(dim);
  auto random_vec = [&] {
    std::vector<float> vec(dim);
    for (auto& v : vec) {
      v = coord(rng);
    }
    return vec;
  };
  for (const auto& pid : passage_ids) {
    table.add_passage(pid, random_vec());
  }
  const Query query{{"head", "Head"}, {"tail", "Tail"},
                    "What is the relation between Head and Tail?"};
  table.add_query(query.text, random_vec());

  std::vector<EvidencePath> paths;
  std::uniform_int_distribution<std::size_t> pick(0, passage_ids.size() - 1);
  for (int i = 0; i < 200000; ++i) {
    EvidencePath path;
    const int hops = 2 + static_cast<int>(rng() % 3);
    for (int h = 0; h < hops; ++h) {
      path.passages.push_back(passage_ids[pick(rng)]);
    }
    paths.push_back(std::move(path));
  }

  DensePairScorer scorer(query, table);
  double serial_time = 1e300;
  double parallel_time = 1e300;
  std::vector<ScoredPath> serial_result;
  std::vector<ScoredPath> parallel_result;
  for (int r = 0; r < repeats; ++r) {
    double t = now();
    serial_result = score_paths_serial(paths, scorer);
    serial_time = std::min(serial_time, now() - t);

    t = now();
    parallel_result = score_paths_parallel(paths, scorer);
    parallel_time = std::min(parallel_time, now() - t);
  }
  for (std::size_t i = 0; i < serial_result.size(); ++i) {
    if (serial_result[i].score != parallel_result[i].score) {
      std::fprintf(stderr, "FATAL: kernel mismatch at path %zu\n", i);
      std::exit(1);
    }
  }
  std::printf("%-28s %10.1f paths/ms %10.1f paths/ms %8.2fx\n", "score_paths (dense_pair)",
              static_cast<double>(paths.size()) / (serial_time * 1e3),
              static_cast<double>(paths.size()) / (parallel_time * 1e3),
              serial_time / parallel_time);
}

void bench_retrieve(const Corpus& corpus, int repeats) {
  std::vector<EntityPair> pairs;
  for (int e = 0; e < 24; ++e) {
    pairs.push_back({"e" + std::to_string(e), "e" + std::to_string(e + 1)});
  }
  PipelineConfig config;
  config.scorer = "bm25";
  config.max_hops = 3;
  config.doc_cap = 8;

  const auto run = [&](int workers) {
    config.workers = workers;
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() /
        ("evipath_bench_" + std::to_string(workers) + "_" + std::to_string(::getpid()));
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
      const double t = now();
      run_retrieve(corpus, config, pairs, dir);
      best = std::min(best, now() - t);
    }
    std::filesystem::remove_all(dir);
    return best;
  };

  const double serial_time = run(1);
  const double parallel_time = run(0);
  std::printf("%-28s %10.1f pairs/s  %10.1f pairs/s  %8.2fx\n", "retrieve batch (bm25)",
              static_cast<double>(pairs.size()) / serial_time,
              static_cast<double>(pairs.size()) / parallel_time,
              serial_time / parallel_time);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads available: %d\n", omp_get_max_threads());
  std::printf("%-28s %14s %14s %9s\n", "kernel", "serial", "openmp", "speedup");

  std::istringstream corpus_stream(synthetic_corpus_jsonl(40, 12, 30, 42));
  const Corpus corpus = Corpus::ingest(corpus_stream, nullptr);

  bench_scoring(corpus, repeats);
  bench_retrieve(corpus, repeats);
  return 0;
}
