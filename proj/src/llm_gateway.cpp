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

#include "ragscope/llm_gateway.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <openssl/evp.h>

#include "ragscope/error.hpp"

namespace ragscope {
namespace {

using json = nlohmann::json;

class HttpTransport : public Transport {
 public:
  HttpTransport(const std::string& base_url, std::chrono::seconds timeout) : timeout_(timeout) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: " + base_url);
    const auto path_start = base_url.find('/', scheme_end + 3);
    origin_ = base_url.substr(0, path_start);
    if (path_start != std::string::npos) prefix_ = base_url.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  HttpReply post(const std::string& path, const std::string& body,
                 const HttpHeaders& headers) override {
    // httplib clients are not safe to share across threads; one per call.
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    httplib::Headers h;
    for (const auto& [key, value] : headers) h.emplace(key, value);
    auto result = client.Post(prefix_ + path, h, body, "application/json");
    if (!result) return {0, {}, httplib::to_string(result.error())};
    return {result->status, result->body, {}};
  }

 private:
  std::string origin_;
  std::string prefix_;
  std::chrono::seconds timeout_;
};

bool retryable(int status) { return status == 0 || status == 429 || status >= 500; }

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string snippet(const std::string& body) {
  return body.size() <= 200 ? body : body.substr(0, 200) + "...";
}

}  // namespace

void ChatRequest::validate() const {
  if (model.empty()) throw PreconditionError("chat request has no model");
  if (!(temperature >= 0.0)) throw PreconditionError("temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw PreconditionError("top_p must be in (0, 1]");
  if (max_new_tokens < 1) throw PreconditionError("max_new_tokens must be >= 1");
}

json ChatRequest::to_body() const {
  json messages = json::array();
  if (system) messages.push_back({{"role", "system"}, {"content", *system}});
  messages.push_back({{"role", "user"}, {"content", user}});
  return {{"model", model},         {"messages", messages},
          {"temperature", temperature}, {"top_p", top_p},
          {"max_tokens", max_new_tokens}, {"n", 1}};
}

std::chrono::milliseconds RetryPolicy::delay(std::size_t retry_index) const {
  if (backoff.empty()) return std::chrono::milliseconds(0);
  return backoff[std::min(retry_index, backoff.size() - 1)];
}

void GatewayConfig::validate() const {
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
  if (embed_batch_size < 1) throw ConfigError("embed_batch_size must be >= 1");
}

std::shared_ptr<Transport> make_http_transport(const std::string& base_url,
                                               std::chrono::seconds timeout) {
  return std::make_shared<HttpTransport>(base_url, timeout);
}

std::string request_cache_key(const std::string& path, const json& body) {
  return sha256_hex(path + "\n" + body.dump());
}

Gateway::Gateway(GatewayConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  config_.validate();
  if (!transport_) transport_ = make_http_transport(config_.base_url, config_.timeout);
  admission_ = std::make_unique<std::counting_semaphore<>>(
      static_cast<std::ptrdiff_t>(config_.max_in_flight));
}

GatewayStats Gateway::stats() const {
  return {network_requests_.load(), cache_hits_.load(), retries_.load()};
}

std::optional<std::string> Gateway::cache_lookup(const std::string& key) const {
  if (!config_.cache_dir) return std::nullopt;
  std::ifstream in(*config_.cache_dir / (key + ".json"), std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const auto entry = json::parse(in);
    return entry.at("response").get<std::string>();
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void Gateway::cache_store(const std::string& key, const std::string& path, const json& body,
                          const std::string& response) const {
  if (!config_.cache_dir) return;
  std::filesystem::create_directories(*config_.cache_dir);
  const auto final_path = *config_.cache_dir / (key + ".json");
  std::ostringstream tid;
  tid << std::this_thread::get_id();
  const auto tmp_path = *config_.cache_dir / (key + ".tmp" + tid.str());
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    json entry = {{"path", path}, {"request", body}, {"response", response}};
    out << entry.dump(2) << '\n';
  }
  std::error_code ec;
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) std::filesystem::remove(tmp_path, ec);
}

std::string Gateway::post_json(const std::string& path, const json& body) {
  const auto key = request_cache_key(path, body);
  if (auto cached = cache_lookup(key)) {
    ++cache_hits_;
    return *cached;
  }

  HttpHeaders headers = {{"Accept", "application/json"}};
  if (!config_.api_key_env.empty()) {
    const char* key_value = std::getenv(config_.api_key_env.c_str());
    if (key_value == nullptr || *key_value == '\0') {
      throw ConfigError("missing API key: environment variable " + config_.api_key_env +
                        " is not set");
    }
    headers.emplace_back("Authorization", std::string("Bearer ") + key_value);
  }
  const std::string payload = body.dump();
  HttpReply reply;
  for (std::size_t attempt = 1;; ++attempt) {
    admission_->acquire();
    ++network_requests_;
    try {
      reply = transport_->post(path, payload, headers);
    } catch (...) {
      admission_->release();
      throw;
    }
    admission_->release();

    if (reply.status >= 200 && reply.status < 300) break;
    const std::string detail =
        reply.status == 0 ? "transport error: " + reply.error
                          : "HTTP " + std::to_string(reply.status) + ": " + snippet(reply.body);
    if (!retryable(reply.status)) {
      throw GatewayError(path + " failed with non-retryable " + detail, reply.status);
    }
    if (attempt >= config_.retry.max_attempts) {
      throw GatewayError(path + " failed after " + std::to_string(attempt) + " attempts, last " +
                             detail,
                         reply.status);
    }
    ++retries_;
    std::this_thread::sleep_for(config_.retry.delay(attempt - 1));
  }

  if (!json::accept(reply.body)) {
    throw GatewayError(path + " returned a body that is not JSON: " + snippet(reply.body),
                       reply.status);
  }
  cache_store(key, path, body, reply.body);
  return reply.body;
}

std::string Gateway::chat_complete(const ChatRequest& request) {
  request.validate();
  const auto body = json::parse(post_json("/chat/completions", request.to_body()));
  try {
    const auto& content = body.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw GatewayError("chat completion content is not text");
    return content.get<std::string>();
  } catch (const json::exception&) {
    throw GatewayError("malformed chat completion response: " + snippet(body.dump()));
  }
}

std::vector<std::vector<float>> Gateway::embed_batch(std::span<const std::string> texts,
                                                     const std::string& model) {
  json body = {{"input", std::vector<std::string>(texts.begin(), texts.end())},
               {"model", model}};
  const auto reply = json::parse(post_json("/embeddings", body));
  std::vector<std::vector<float>> out;
  try {
    const auto& data = reply.at("data");
    if (data.size() != texts.size()) throw GatewayError("response cardinality mismatch");
    out.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const std::size_t slot = data[i].contains("index") ? data[i]["index"].get<std::size_t>() : i;
      if (slot >= out.size() || !out[slot].empty()) {
        throw GatewayError("embedding response has inconsistent indexes");
      }
      out[slot] = data[i].at("embedding").get<std::vector<float>>();
      if (out[slot].empty()) throw GatewayError("empty embedding vector");
    }
  } catch (const json::exception&) {
    throw GatewayError("malformed embedding response: " + snippet(reply.dump()));
  }
  return out;
}

std::vector<std::vector<float>> Gateway::embed_texts(std::span<const std::string> texts,
                                                     const std::string& model) {
  if (texts.empty()) throw PreconditionError("embed_texts needs at least one text");
  for (const auto& t : texts) {
    if (t.empty()) throw PreconditionError("embed_texts got an empty text");
  }
  const std::size_t batch = config_.embed_batch_size;
  std::vector<std::future<std::vector<std::vector<float>>>> pending;
  for (std::size_t begin = 0; begin < texts.size(); begin += batch) {
    const auto part = texts.subspan(begin, std::min(batch, texts.size() - begin));
    pending.push_back(std::async(std::launch::async,
                                 [this, part, &model] { return embed_batch(part, model); }));
  }
  std::vector<std::vector<float>> out;
  out.reserve(texts.size());
  std::exception_ptr first_error;
  for (auto& f : pending) {
    try {
      for (auto& v : f.get()) out.push_back(std::move(v));
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  for (const auto& v : out) {
    if (v.size() != out.front().size()) throw GatewayError("embedding dimension mismatch");
  }
  return out;
}

}  // namespace ragscope
