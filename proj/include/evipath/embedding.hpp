#pragma once
// Embedding sources for dense scoring. Two providers share one interface:
// an in-memory table loaded from an embedding file, and an HTTP client that
// embeds texts on demand with batching, retries, and a text-keyed cache.
//
// A vector that cannot be resolved is always a hard error naming the missing
// key; scoring never silently substitutes zeros.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace evipath {

class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingEmbeddingError : public EmbeddingError {
 public:
  using EmbeddingError::EmbeddingError;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string_view provenance() const = 0;

  // Vector for a plain or augmented query text (the text is the key).
  virtual std::span<const float> query_vector(const std::string& text) = 0;
  // Vector for a passage, keyed by passage id.
  virtual std::span<const float> passage_vector(const std::string& passage_id) = 0;

  // Batched warm-up; no-ops for the file-backed table.
  virtual void prefetch_queries(const std::vector<std::string>& texts);
  virtual void prefetch_passages(const std::vector<std::string>& passage_ids);
};

// File format: header line "dim=<int>", then one JSON record per line:
//   {"key": str, "kind": "query"|"passage", "vec": [float, ...]}
class EmbeddingTable final : public EmbeddingProvider {
 public:
  static EmbeddingTable load(const std::filesystem::path& file);

  std::size_t dim() const override { return dim_; }
  std::string_view provenance() const override { return "file"; }
  std::span<const float> query_vector(const std::string& text) override;
  std::span<const float> passage_vector(const std::string& passage_id) override;

  std::size_t query_count() const { return query_vectors_.size(); }
  std::size_t passage_count() const { return passage_vectors_.size(); }

  void add_query(const std::string& key, std::vector<float> vec);
  void add_passage(const std::string& key, std::vector<float> vec);
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<float>> query_vectors_;
  std::unordered_map<std::string, std::vector<float>> passage_vectors_;
};

struct ServiceConfig {
  std::string endpoint;       // e.g. http://127.0.0.1:8080/embed
  int timeout_ms = 10000;
  int max_attempts = 3;       // total tries per batch
  int backoff_ms = 100;       // doubles per retry
  std::size_t batch_size = 32;
};

// Texts are embedded via HTTP POST {"texts": [...]} -> {"vectors": [[...]]}
// (order-preserving). Responses are cached by text, so repeated lookups of
// the same text cost exactly one outbound call. Passage ids resolve to text
// through the callback supplied at construction.
class ServiceEmbeddingProvider final : public EmbeddingProvider {
 public:
  using PassageTextFn = std::function<std::string(const std::string&)>;

  ServiceEmbeddingProvider(ServiceConfig config, PassageTextFn passage_text);
  ~ServiceEmbeddingProvider() override;

  std::size_t dim() const override;
  std::string_view provenance() const override { return "service"; }
  std::span<const float> query_vector(const std::string& text) override;
  std::span<const float> passage_vector(const std::string& passage_id) override;
  void prefetch_queries(const std::vector<std::string>& texts) override;
  void prefetch_passages(const std::vector<std::string>& passage_ids) override;

  std::size_t outbound_calls() const;
  std::size_t cache_size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace evipath
