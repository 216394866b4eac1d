#include "evipath/embedding.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace evipath {

void EmbeddingProvider::prefetch_queries(const std::vector<std::string>&) {}
void EmbeddingProvider::prefetch_passages(const std::vector<std::string>&) {}

// ---------------------------------------------------------------------------
// File-backed table

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw EmbeddingError("cannot open embedding file " + file.string());
  }
  std::string header;
  if (!std::getline(in, header) || header.rfind("dim=", 0) != 0) {
    throw EmbeddingError(file.string() + ": first line must be dim=<int>");
  }
  std::size_t dim = 0;
  try {
    dim = std::stoul(header.substr(4));
  } catch (const std::exception&) {
    throw EmbeddingError(file.string() + ": bad dimension header \"" + header + "\"");
  }
  if (dim == 0) {
    throw EmbeddingError(file.string() + ": dimension must be positive");
  }

  EmbeddingTable table(dim);
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    ++record;
    nlohmann::json parsed;
    try {
      parsed = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw EmbeddingError(file.string() + ": record " + std::to_string(record) +
                           ": invalid JSON: " + e.what());
    }
    const std::string key = parsed.value("key", "");
    const std::string kind = parsed.value("kind", "");
    if (key.empty() || (kind != "query" && kind != "passage")) {
      throw EmbeddingError(file.string() + ": record " + std::to_string(record) +
                           ": need non-empty key and kind query|passage");
    }
    if (!parsed.contains("vec") || !parsed["vec"].is_array()) {
      throw EmbeddingError(file.string() + ": record " + std::to_string(record) +
                           ": missing vec array");
    }
    std::vector<float> vec;
    vec.reserve(parsed["vec"].size());
    for (const auto& v : parsed["vec"]) {
      vec.push_back(v.get<float>());
    }
    if (vec.size() != dim) {
      throw EmbeddingError(file.string() + ": record " + std::to_string(record) + ": vector of dim " +
                           std::to_string(vec.size()) + " in a dim=" + std::to_string(dim) + " table");
    }
    if (kind == "query") {
      table.add_query(key, std::move(vec));
    } else {
      table.add_passage(key, std::move(vec));
    }
  }
  return table;
}

void EmbeddingTable::add_query(const std::string& key, std::vector<float> vec) {
  if (vec.size() != dim_) {
    throw EmbeddingError("query vector for \"" + key + "\" has dim " +
                         std::to_string(vec.size()) + ", table dim is " + std::to_string(dim_));
  }
  query_vectors_[key] = std::move(vec);
}

void EmbeddingTable::add_passage(const std::string& key, std::vector<float> vec) {
  if (vec.size() != dim_) {
    throw EmbeddingError("passage vector for \"" + key + "\" has dim " +
                         std::to_string(vec.size()) + ", table dim is " + std::to_string(dim_));
  }
  passage_vectors_[key] = std::move(vec);
}

std::span<const float> EmbeddingTable::query_vector(const std::string& text) {
  const auto it = query_vectors_.find(text);
  if (it == query_vectors_.end()) {
    throw MissingEmbeddingError("no query embedding for \"" + text + "\"");
  }
  return it->second;
}

std::span<const float> EmbeddingTable::passage_vector(const std::string& passage_id) {
  const auto it = passage_vectors_.find(passage_id);
  if (it == passage_vectors_.end()) {
    throw MissingEmbeddingError("no passage embedding for \"" + passage_id + "\"");
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// Service-backed provider

struct ServiceEmbeddingProvider::Impl {
  ServiceConfig config;
  PassageTextFn passage_text;

  std::string host;
  std::string path;

  mutable std::shared_mutex mutex;
  std::unordered_map<std::string, std::vector<float>> cache;  // text -> vector
  std::size_t dim = 0;
  std::size_t outbound_calls = 0;

  const std::vector<float>* lookup(const std::string& text) const {
    const auto it = cache.find(text);
    return it == cache.end() ? nullptr : &it->second;
  }

  // Fetch one batch from the service with retry + exponential backoff.
  std::vector<std::vector<float>> fetch(const std::vector<std::string>& texts) {
    nlohmann::json body{{"texts", texts}};
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(config.backoff_ms << (attempt - 1)));
      }
      httplib::Client client(host);
      client.set_connection_timeout(0, config.timeout_ms * 1000);
      client.set_read_timeout(config.timeout_ms / 1000, (config.timeout_ms % 1000) * 1000);

      ++outbound_calls;
      auto res = client.Post(path, payload, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status < 200 || res->status >= 300) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      nlohmann::json parsed;
      try {
        parsed = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error& e) {
        last_error = std::string("bad response JSON: ") + e.what();
        continue;
      }
      if (!parsed.contains("vectors") || !parsed["vectors"].is_array() ||
          parsed["vectors"].size() != texts.size()) {
        throw EmbeddingError("embedding service returned " +
                             std::to_string(parsed.value("vectors", nlohmann::json::array()).size()) +
                             " vectors for " + std::to_string(texts.size()) + " texts");
      }
      std::vector<std::vector<float>> vectors;
      vectors.reserve(texts.size());
      for (const auto& vj : parsed["vectors"]) {
        std::vector<float> vec;
        vec.reserve(vj.size());
        for (const auto& v : vj) {
          vec.push_back(v.get<float>());
        }
        vectors.push_back(std::move(vec));
      }
      return vectors;
    }
    throw EmbeddingError("embedding service failed after " +
                         std::to_string(config.max_attempts) + " attempts (" + last_error +
                         ") for endpoint " + config.endpoint);
  }

  // Resolve texts not yet cached, in batches; cache writes are serialized.
  void ensure(const std::vector<std::string>& texts) {
    std::vector<std::string> missing;
    {
      std::shared_lock lock(mutex);
      for (const auto& text : texts) {
        if (cache.count(text) == 0) {
          missing.push_back(text);
        }
      }
    }
    if (missing.empty()) {
      return;
    }
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());

    for (std::size_t offset = 0; offset < missing.size(); offset += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, missing.size() - offset);
      std::vector<std::string> batch(missing.begin() + offset, missing.begin() + offset + count);

      std::unique_lock lock(mutex);
      // Re-check under the write lock; another thread may have fetched these.
      std::vector<std::string> still_missing;
      for (auto& text : batch) {
        if (cache.count(text) == 0) {
          still_missing.push_back(std::move(text));
        }
      }
      if (still_missing.empty()) {
        continue;
      }
      const auto vectors = fetch(still_missing);
      for (std::size_t i = 0; i < still_missing.size(); ++i) {
        if (dim == 0) {
          dim = vectors[i].size();
          if (dim == 0) {
            throw EmbeddingError("embedding service returned an empty vector");
          }
        } else if (vectors[i].size() != dim) {
          throw EmbeddingError("embedding service changed dimension from " +
                               std::to_string(dim) + " to " + std::to_string(vectors[i].size()));
        }
        cache[still_missing[i]] = vectors[i];
      }
    }
  }

  std::span<const float> get(const std::string& text) {
    {
      std::shared_lock lock(mutex);
      if (const auto* vec = lookup(text)) {
        return *vec;
      }
    }
    ensure({text});
    std::shared_lock lock(mutex);
    if (const auto* vec = lookup(text)) {
      return *vec;
    }
    throw MissingEmbeddingError("no embedding for \"" + text + "\"");
  }
};

namespace {

// Split http://host:port/path into client host and request path.
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  const auto scheme = endpoint.find("://");
  const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const auto slash = endpoint.find('/', host_start);
  if (slash == std::string::npos) {
    return {endpoint, "/"};
  }
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

}  // namespace

ServiceEmbeddingProvider::ServiceEmbeddingProvider(ServiceConfig config,
                                                   PassageTextFn passage_text)
    : impl_(std::make_unique<Impl>()) {
  if (config.endpoint.empty()) {
    throw EmbeddingError("embedding service endpoint is empty");
  }
  impl_->config = std::move(config);
  impl_->passage_text = std::move(passage_text);
  std::tie(impl_->host, impl_->path) = split_endpoint(impl_->config.endpoint);
}

ServiceEmbeddingProvider::~ServiceEmbeddingProvider() = default;

std::size_t ServiceEmbeddingProvider::dim() const {
  std::shared_lock lock(impl_->mutex);
  return impl_->dim;
}

std::span<const float> ServiceEmbeddingProvider::query_vector(const std::string& text) {
  return impl_->get(text);
}

std::span<const float> ServiceEmbeddingProvider::passage_vector(const std::string& passage_id) {
  return impl_->get(impl_->passage_text(passage_id));
}

void ServiceEmbeddingProvider::prefetch_queries(const std::vector<std::string>& texts) {
  impl_->ensure(texts);
}

void ServiceEmbeddingProvider::prefetch_passages(const std::vector<std::string>& passage_ids) {
  std::vector<std::string> texts;
  texts.reserve(passage_ids.size());
  for (const auto& pid : passage_ids) {
    texts.push_back(impl_->passage_text(pid));
  }
  impl_->ensure(texts);
}

std::size_t ServiceEmbeddingProvider::outbound_calls() const {
  std::shared_lock lock(impl_->mutex);
  return impl_->outbound_calls;
}

std::size_t ServiceEmbeddingProvider::cache_size() const {
  std::shared_lock lock(impl_->mutex);
  return impl_->cache.size();
}

}  // namespace evipath
