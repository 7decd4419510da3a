#include "embias/provider.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "embias/sha256.hpp"
#include "httplib.h"
#include "json.hpp"

namespace embias::provider {
namespace {

using nlohmann::json;

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Model-derived cache file name: readable prefix plus a hash suffix so
// models that sanitize to the same prefix cannot share a file.
std::string cache_file_name(const std::string& model) {
  std::string safe;
  for (char c : model) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    safe += ok ? c : '_';
  }
  if (safe.size() > 64) safe.resize(64);
  return safe + "-" + sha256_hex(model).substr(0, 8) + ".vecs";
}

void check_embedding(const linalg::Vector& v, const std::string& text) {
  if (v.empty()) {
    throw std::runtime_error("provider returned an empty embedding for \"" +
                             text + "\"");
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::runtime_error(
          "provider returned a non-finite embedding value for \"" + text + "\"");
    }
  }
}

}  // namespace

std::string cache_key(const std::string& model, const std::string& text) {
  // Length-prefixed framing: no (model, text) pair can collide with another.
  std::string framed = std::to_string(model.size()) + ":" + model + "," +
                       std::to_string(text.size()) + ":" + text;
  return sha256_hex(framed);
}

EmbeddingCache::EmbeddingCache(std::filesystem::path dir,
                               const std::string& model) {
  std::filesystem::create_directories(dir);
  file_ = dir / cache_file_name(model);
  std::ifstream in(file_, std::ios::binary);
  if (!in) return;
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string blob = buf.str();

  // Records are "<len> <payload>" where len counts the payload bytes
  // (terminating newline included). Anything malformed can only be an
  // interrupted tail write: stop and drop the rest.
  std::size_t pos = 0;
  while (pos < blob.size()) {
    std::size_t sp = blob.find(' ', pos);
    if (sp == std::string::npos || sp == pos) break;
    std::size_t len = 0;
    bool digits_ok = true;
    for (std::size_t i = pos; i < sp; ++i) {
      if (blob[i] < '0' || blob[i] > '9') {
        digits_ok = false;
        break;
      }
      len = len * 10 + static_cast<std::size_t>(blob[i] - '0');
    }
    if (!digits_ok || len == 0) break;
    const std::size_t payload_start = sp + 1;
    if (payload_start + len > blob.size()) break;  // truncated tail
    if (blob[payload_start + len - 1] != '\n') break;
    std::istringstream payload(blob.substr(payload_start, len - 1));
    std::string key;
    std::size_t dim = 0;
    if (!(payload >> key >> dim) || key.empty() || dim == 0) break;
    linalg::Vector values(dim);
    bool ok = true;
    for (std::size_t i = 0; i < dim; ++i) {
      if (!(payload >> values[i]) || !std::isfinite(values[i])) {
        ok = false;
        break;
      }
    }
    std::string extra;
    if (!ok || (payload >> extra)) break;
    entries_[key] = std::move(values);  // later record wins
    pos = payload_start + len;
  }
}

std::optional<linalg::Vector> EmbeddingCache::lookup(
    const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingCache::store(const std::string& key,
                           const linalg::Vector& values) {
  std::string payload = key + " " + std::to_string(values.size());
  for (double v : values) {
    payload += " ";
    payload += format_value(v);
  }
  payload += "\n";
  const std::string record = std::to_string(payload.size()) + " " + payload;

  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(file_, std::ios::binary | std::ios::app);
  if (!out) {
    throw std::runtime_error("cannot open cache file " + file_.string());
  }
  out.write(record.data(), static_cast<std::streamsize>(record.size()));
  out.flush();
  entries_[key] = values;
}

Provider::Provider(ProviderConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.model.empty()) {
    throw std::invalid_argument("provider config needs a model name");
  }
  if (cfg_.batch_size < 1) {
    throw std::invalid_argument("provider batch_size must be >= 1");
  }
  if (!cfg_.cache_dir.empty()) {
    cache_.emplace(cfg_.cache_dir, cfg_.model);
  }
}

std::vector<EmbeddingVector> Provider::embed_batch(
    const std::vector<std::string>& texts) {
  if (texts.empty()) {
    throw std::invalid_argument("embed_batch: empty text list");
  }
  for (const auto& t : texts) {
    if (t.empty()) throw std::invalid_argument("embed_batch: empty text");
  }

  std::vector<std::optional<linalg::Vector>> found(texts.size());
  if (cache_) {
    for (std::size_t i = 0; i < texts.size(); ++i) {
      found[i] = cache_->lookup(cache_key(cfg_.model, texts[i]));
    }
  }

  // Unique uncached texts in first-appearance order.
  std::vector<std::string> missing;
  std::map<std::string, std::size_t> missing_index;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (found[i]) continue;
    if (missing_index.emplace(texts[i], missing.size()).second) {
      missing.push_back(texts[i]);
    }
  }

  std::vector<linalg::Vector> fetched;
  if (!missing.empty()) {
    fetched = fetch(missing);
    if (fetched.size() != missing.size()) {
      throw std::runtime_error(
          "provider returned " + std::to_string(fetched.size()) +
          " embeddings for " + std::to_string(missing.size()) + " texts");
    }
    for (std::size_t i = 0; i < missing.size(); ++i) {
      check_embedding(fetched[i], missing[i]);
      if (cache_) cache_->store(cache_key(cfg_.model, missing[i]), fetched[i]);
    }
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    linalg::Vector values =
        found[i] ? std::move(*found[i]) : fetched[missing_index.at(texts[i])];
    check_embedding(values, texts[i]);
    out.push_back({texts[i], cfg_.model, std::move(values)});
  }
  const std::size_t dim = out.front().values.size();
  for (const auto& e : out) {
    if (e.values.size() != dim) {
      throw std::runtime_error("provider returned inconsistent dimensions (" +
                               std::to_string(dim) + " vs " +
                               std::to_string(e.values.size()) + ") for model " +
                               cfg_.model);
    }
  }
  return out;
}

namespace {

std::map<std::string, linalg::Vector> load_vectors_doc(
    const std::filesystem::path& path, const std::string& expect_model) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open vectors file " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": invalid JSON: " + e.what());
  }
  if (doc.contains("model") && doc["model"].is_string()) {
    const std::string file_model = doc["model"].get<std::string>();
    if (!file_model.empty() && file_model != expect_model) {
      throw std::runtime_error(path.string() + " holds vectors for model '" +
                               file_model + "' but the provider is configured '" +
                               expect_model + "'");
    }
  }
  if (!doc.contains("vectors") || !doc["vectors"].is_object()) {
    throw std::runtime_error(path.string() +
                             ": missing or non-object field 'vectors'");
  }
  std::map<std::string, linalg::Vector> out;
  for (const auto& [text, arr] : doc["vectors"].items()) {
    if (!arr.is_array() || arr.empty()) {
      throw std::runtime_error(path.string() + ": vector for \"" + text +
                               "\" must be a non-empty array");
    }
    linalg::Vector v;
    v.reserve(arr.size());
    for (const auto& x : arr) {
      if (!x.is_number()) {
        throw std::runtime_error(path.string() + ": vector for \"" + text +
                                 "\" holds a non-number");
      }
      v.push_back(x.get<double>());
    }
    out[text] = std::move(v);
  }
  return out;
}

}  // namespace

FileProvider::FileProvider(ProviderConfig cfg) : Provider(std::move(cfg)) {
  if (config().vectors_path.empty()) {
    throw std::invalid_argument("file provider needs vectors_path");
  }
  vectors_ = load_vectors_doc(config().vectors_path, config().model);
}

std::vector<linalg::Vector> FileProvider::fetch(
    const std::vector<std::string>& texts) {
  std::vector<linalg::Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const auto it = vectors_.find(t);
    if (it == vectors_.end()) {
      std::string shown = t.size() > 80 ? t.substr(0, 77) + "..." : t;
      throw std::runtime_error("vectors file " +
                               config().vectors_path.string() +
                               " has no embedding for \"" + shown + "\"");
    }
    out.push_back(it->second);
  }
  return out;
}

HttpProvider::HttpProvider(ProviderConfig cfg) : Provider(std::move(cfg)) {
  const std::string& ep = config().endpoint;
  if (ep.empty()) throw std::invalid_argument("http provider needs endpoint");
  const std::size_t scheme = ep.find("://");
  if (scheme == std::string::npos) {
    throw std::invalid_argument("endpoint must look like http://host[:port]/path");
  }
  const std::size_t slash = ep.find('/', scheme + 3);
  if (slash == std::string::npos) {
    host_ = ep;
    path_ = "/v1/embeddings";
  } else {
    host_ = ep.substr(0, slash);
    path_ = ep.substr(slash);
  }
}

std::vector<linalg::Vector> HttpProvider::fetch(
    const std::vector<std::string>& texts) {
  const auto& cfg = config();
  std::vector<std::vector<std::string>> batches;
  for (std::size_t i = 0; i < texts.size(); i += cfg.batch_size) {
    const std::size_t end = std::min(texts.size(), i + cfg.batch_size);
    batches.emplace_back(texts.begin() + i, texts.begin() + end);
  }

  auto fetch_batch = [&](const std::vector<std::string>& batch) {
    json body;
    body["model"] = cfg.model;
    body["input"] = batch;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!cfg.auth_token.empty()) {
      headers.emplace("Authorization", "Bearer " + cfg.auth_token);
    }

    std::string last_error;
    for (std::size_t attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
      if (attempt > 1) {
        const auto delay = std::chrono::milliseconds(200LL << (attempt - 2));
        std::this_thread::sleep_for(delay);
      }
      httplib::Client cli(host_);
      const auto secs =
          std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
      const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
          cfg.timeout - secs);
      cli.set_connection_timeout(secs.count(), usecs.count());
      cli.set_read_timeout(secs.count(), usecs.count());
      cli.set_write_timeout(secs.count(), usecs.count());

      auto res = cli.Post(path_, headers, payload, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;  // retryable
      }
      if (res->status >= 500) {
        last_error = "endpoint returned HTTP " + std::to_string(res->status);
        continue;  // retryable
      }
      if (res->status != 200) {
        std::string detail = res->body.substr(0, 200);
        throw std::runtime_error("endpoint returned HTTP " +
                                 std::to_string(res->status) +
                                 (detail.empty() ? "" : ": " + detail));
      }

      json doc;
      try {
        doc = json::parse(res->body);
      } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("endpoint returned invalid JSON: ") +
                                 e.what());
      }
      if (!doc.contains("data") || !doc["data"].is_array() ||
          doc["data"].size() != batch.size()) {
        throw std::runtime_error(
            "endpoint response 'data' must be an array with one entry per input");
      }
      std::vector<linalg::Vector> out(batch.size());
      std::vector<bool> seen(batch.size(), false);
      for (const auto& item : doc["data"]) {
        if (!item.is_object() || !item.contains("index") ||
            !item["index"].is_number_integer() || !item.contains("embedding") ||
            !item["embedding"].is_array()) {
          throw std::runtime_error(
              "endpoint response entries need integer 'index' and array 'embedding'");
        }
        const auto idx = item["index"].get<long long>();
        if (idx < 0 || static_cast<std::size_t>(idx) >= batch.size() ||
            seen[static_cast<std::size_t>(idx)]) {
          throw std::runtime_error(
              "endpoint response holds an out-of-range or duplicate index");
        }
        seen[static_cast<std::size_t>(idx)] = true;
        linalg::Vector v;
        v.reserve(item["embedding"].size());
        for (const auto& x : item["embedding"]) {
          if (!x.is_number()) {
            throw std::runtime_error("embedding array holds a non-number");
          }
          v.push_back(x.get<double>());
        }
        out[static_cast<std::size_t>(idx)] = std::move(v);
      }
      return out;
    }
    throw std::runtime_error("embedding request failed after " +
                             std::to_string(cfg.max_attempts) + " attempts (" +
                             last_error + ")");
  };

  std::vector<std::vector<linalg::Vector>> per_batch(batches.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(cfg.max_parallel, batches.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < batches.size(); ++i) {
      per_batch[i] = fetch_batch(batches[i]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::vector<std::string> errors;
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= batches.size()) return;
        try {
          per_batch[i] = fetch_batch(batches[i]);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mu);
          errors.emplace_back(e.what());
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (!errors.empty()) throw std::runtime_error(errors.front());
  }

  std::vector<linalg::Vector> out;
  out.reserve(texts.size());
  for (auto& b : per_batch) {
    for (auto& v : b) out.push_back(std::move(v));
  }
  return out;
}

MapProvider::MapProvider(std::map<std::string, linalg::Vector> vectors,
                         ProviderConfig cfg)
    : Provider(std::move(cfg)), vectors_(std::move(vectors)) {}

std::vector<linalg::Vector> MapProvider::fetch(
    const std::vector<std::string>& texts) {
  std::vector<linalg::Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const auto it = vectors_.find(t);
    if (it == vectors_.end()) {
      throw std::runtime_error("no embedding registered for \"" + t + "\"");
    }
    out.push_back(it->second);
  }
  return out;
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& cfg) {
  switch (cfg.kind) {
    case ProviderKind::file:
      return std::make_unique<FileProvider>(cfg);
    case ProviderKind::http:
      return std::make_unique<HttpProvider>(cfg);
  }
  throw std::invalid_argument("unknown provider kind");
}

linalg::Matrix to_matrix(const std::vector<EmbeddingVector>& embeddings) {
  if (embeddings.empty()) {
    throw std::invalid_argument("to_matrix: no embeddings");
  }
  std::vector<linalg::Vector> rows;
  rows.reserve(embeddings.size());
  for (const auto& e : embeddings) rows.push_back(e.values);
  return linalg::Matrix::from_rows(rows);
}

}  // namespace embias::provider
