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

// Deterministic stand-ins for a model endpoint, for tests, fixtures and
// offline demos.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "ragscope/llm_gateway.hpp"

namespace ragscope::stub {

/// Answers /chat/completions and /embeddings requests with content derived
/// only from the request. Chat prompts are recognized by the template they
/// were rendered from; each stage gets a well-formed reply built from the
/// prompt's own text (documents state every configuration value, QRA answers
/// quote document sentences, key points are the answer's sentences, the
/// judge applies the MockJudge rules).
HttpReply respond(const std::string& path, const std::string& body);

/// Completion text for one chat prompt.
std::string chat_reply(const std::string& prompt);

/// Hashed bag-of-words vector.
std::vector<float> embed_text(const std::string& text, std::size_t dim = 64);

/// In-process Transport over respond().
class ScriptedTransport : public Transport {
 public:
  HttpReply post(const std::string& path, const std::string& body,
                 const HttpHeaders& headers) override;
  std::size_t calls() const { return calls_.load(); }

 private:
  std::atomic<std::size_t> calls_{0};
};

struct ServerOptions {
  /// The first N requests get this status before normal service resumes.
  std::size_t fail_first = 0;
  int fail_status = 429;
  /// Sleep before answering, to make concurrency observable.
  std::chrono::milliseconds delay{0};
  /// When set, requests must carry "Authorization: Bearer <key>".
  std::string required_key;
  /// Prefix such as "/v1" mounted in front of the endpoints.
  std::string prefix = "/v1";
};

/// cpp-httplib server on 127.0.0.1 serving respond().
class StubServer {
 public:
  explicit StubServer(ServerOptions options = {}, int port = 0);
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  int port() const { return port_; }
  std::string base_url() const;
  std::size_t requests() const { return requests_.load(); }
  std::size_t max_in_flight() const { return max_in_flight_.load(); }
  /// Blocks until stop() is called from another thread or a signal.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ServerOptions options_;
  int port_ = 0;
  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> max_in_flight_{0};
  std::thread thread_;
};

}  // namespace ragscope::stub
