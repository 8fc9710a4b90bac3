// Copyright 2026 The ragscope Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragscope/retrieval.hpp"

namespace ragscope {

inline constexpr double kDefaultTemperature = 0.2;
inline constexpr double kDefaultTopP = 1.0;
inline constexpr int kDefaultMaxNewTokens = 512;
inline constexpr std::size_t kDefaultEmbedBatch = 256;

struct ChatRequest {
  std::string model;
  std::optional<std::string> system;
  std::string user;
  double temperature = kDefaultTemperature;
  double top_p = kDefaultTopP;
  int max_new_tokens = kDefaultMaxNewTokens;

  /// Throws PreconditionError on out-of-range sampling parameters.
  void validate() const;
  /// OpenAI-compatible /chat/completions body.
  nlohmann::json to_body() const;
};

struct RetryPolicy {
  std::size_t max_attempts = 4;
  /// Sleep before retry i is backoff[min(i, size - 1)].
  std::vector<std::chrono::milliseconds> backoff = {std::chrono::milliseconds(500),
                                                    std::chrono::milliseconds(2000),
                                                    std::chrono::milliseconds(8000)};

  std::chrono::milliseconds delay(std::size_t retry_index) const;
};

struct GatewayConfig {
  std::string base_url = "https://api.openai.com/v1";
  /// Environment variable holding the API key. Empty means no key is sent.
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t max_in_flight = 8;
  RetryPolicy retry;
  std::optional<std::filesystem::path> cache_dir;
  std::size_t embed_batch_size = kDefaultEmbedBatch;
  std::chrono::seconds timeout{120};

  void validate() const;
};

struct HttpReply {
  /// 0 when the request never produced an HTTP response.
  int status = 0;
  std::string body;
  std::string error;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

/// One POST of a JSON body. Implementations must be callable concurrently.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpReply post(const std::string& path, const std::string& body,
                         const HttpHeaders& headers) = 0;
};

/// cpp-httplib backed transport; `base_url` may carry a path prefix such as /v1.
std::shared_ptr<Transport> make_http_transport(const std::string& base_url,
                                               std::chrono::seconds timeout);

struct GatewayStats {
  std::size_t network_requests = 0;
  std::size_t cache_hits = 0;
  std::size_t retries = 0;
};

/// Hex SHA-256 of the endpoint path and canonical JSON body; the cache file
/// for a request is `<cache_dir>/<key>.json`.
std::string request_cache_key(const std::string& path, const nlohmann::json& body);

/// Chat and embedding client for OpenAI-compatible endpoints. Thread-safe;
/// at most `max_in_flight` requests are outstanding at any time.
class Gateway {
 public:
  explicit Gateway(GatewayConfig config, std::shared_ptr<Transport> transport = nullptr);
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Text of the first choice.
  std::string chat_complete(const ChatRequest& request);

  /// One vector per input text, in input order.
  std::vector<std::vector<float>> embed_texts(std::span<const std::string> texts,
                                              const std::string& model);

  GatewayStats stats() const;
  const GatewayConfig& config() const { return config_; }

 private:
  std::string post_json(const std::string& path, const nlohmann::json& body);
  std::optional<std::string> cache_lookup(const std::string& key) const;
  void cache_store(const std::string& key, const std::string& path,
                   const nlohmann::json& body, const std::string& response) const;
  std::vector<std::vector<float>> embed_batch(std::span<const std::string> texts,
                                              const std::string& model);

  GatewayConfig config_;
  std::shared_ptr<Transport> transport_;
  std::unique_ptr<std::counting_semaphore<>> admission_;
  std::atomic<std::size_t> network_requests_{0};
  std::atomic<std::size_t> cache_hits_{0};
  std::atomic<std::size_t> retries_{0};
};

/// Embedder backed by a gateway's embedding endpoint.
class GatewayEmbedder : public Embedder {
 public:
  GatewayEmbedder(Gateway& gateway, std::string model)
      : gateway_(gateway), model_(std::move(model)) {}
  std::vector<std::vector<float>> embed(std::span<const std::string> texts) override {
    return gateway_.embed_texts(texts, model_);
  }

 private:
  Gateway& gateway_;
  std::string model_;
};

}  // namespace ragscope
