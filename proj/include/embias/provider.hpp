#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "embias/linalg.hpp"

namespace embias::provider {

struct EmbeddingVector {
  std::string text;
  std::string model;
  linalg::Vector values;
  bool operator==(const EmbeddingVector&) const = default;
};

enum class ProviderKind { file, http };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::file;
  std::string model = "default";
  std::string endpoint;                 // http: e.g. http://host:port/v1/embeddings
  std::string auth_token;               // http: sent as Bearer when non-empty
  std::filesystem::path vectors_path;   // file: precomputed vectors document
  std::filesystem::path cache_dir;      // empty disables the disk cache
  std::size_t batch_size = 32;
  std::size_t max_parallel = 4;
  std::chrono::milliseconds timeout{30000};
  std::size_t max_attempts = 3;
};

// Key under which (model, text) is cached: SHA-256 of a length-prefixed
// encoding, so distinct (model, text) never collide regardless of content.
std::string cache_key(const std::string& model, const std::string& text);

// Append-only disk cache, one record file per model. Records that were cut
// short by an interrupted write are dropped on load; when a key appears more
// than once the latest record wins.
class EmbeddingCache {
 public:
  EmbeddingCache(std::filesystem::path dir, const std::string& model);

  std::optional<linalg::Vector> lookup(const std::string& key) const;
  void store(const std::string& key, const linalg::Vector& values);
  std::size_t size() const { return entries_.size(); }
  const std::filesystem::path& file() const { return file_; }

 private:
  std::filesystem::path file_;
  std::unordered_map<std::string, linalg::Vector> entries_;
  mutable std::mutex mu_;
};

// Embedding source. embed_batch handles caching, de-duplication, dimension
// checks, and order preservation; subclasses fetch what the cache lacks.
class Provider {
 public:
  explicit Provider(ProviderConfig cfg);
  virtual ~Provider() = default;

  // Embeds texts in order (output[i] corresponds to texts[i]). Throws on an
  // empty list, an empty text, or any fetch/validation failure.
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts);

  const ProviderConfig& config() const { return cfg_; }

 protected:
  // Called only for texts the cache does not hold; texts are unique.
  // Must return one vector per text, in order.
  virtual std::vector<linalg::Vector> fetch(const std::vector<std::string>& texts) = 0;

 private:
  ProviderConfig cfg_;
  std::optional<EmbeddingCache> cache_;
};

// Reads a vectors document: {"model": "...", "vectors": {text: [numbers]}}.
// Missing texts are an error naming the text.
class FileProvider : public Provider {
 public:
  explicit FileProvider(ProviderConfig cfg);

 protected:
  std::vector<linalg::Vector> fetch(const std::vector<std::string>& texts) override;

 private:
  std::map<std::string, linalg::Vector> vectors_;
};

// Talks to an embeddings endpoint: POST {"model", "input": [texts]} ->
// {"data": [{"index", "embedding"}...]}, reassembled by index. Batches are
// fetched with up to max_parallel threads; transport errors and 5xx are
// retried with exponential backoff up to max_attempts, 4xx and malformed
// responses fail immediately.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(ProviderConfig cfg);

 protected:
  std::vector<linalg::Vector> fetch(const std::vector<std::string>& texts) override;

 private:
  std::string host_;
  std::string path_;
};

// In-memory provider for tests and synthetic fixtures.
class MapProvider : public Provider {
 public:
  MapProvider(std::map<std::string, linalg::Vector> vectors,
              ProviderConfig cfg = {});

 protected:
  std::vector<linalg::Vector> fetch(const std::vector<std::string>& texts) override;

 private:
  std::map<std::string, linalg::Vector> vectors_;
};

std::unique_ptr<Provider> make_provider(const ProviderConfig& cfg);

// Rows = embeddings of the given texts, in order.
linalg::Matrix to_matrix(const std::vector<EmbeddingVector>& embeddings);

}  // namespace embias::provider
