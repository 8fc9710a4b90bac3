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

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "ragscope/stub.hpp"

namespace {
ragscope::stub::StubServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic OpenAI-compatible stub endpoint for offline runs."};
  int port = 0;
  ragscope::stub::ServerOptions options;
  int delay_ms = 0;
  app.add_option("--port", port, "Port to listen on (0 picks a free one)");
  app.add_option("--fail-first", options.fail_first, "Fail this many requests first");
  app.add_option("--fail-status", options.fail_status, "Status used for injected failures");
  app.add_option("--delay-ms", delay_ms, "Delay before every reply");
  app.add_option("--require-key", options.required_key, "Expected bearer token");
  CLI11_PARSE(app, argc, argv);
  options.delay = std::chrono::milliseconds(delay_ms);

  ragscope::stub::StubServer server(options, port);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << server.base_url() << std::endl;
  server.wait();
  return 0;
}
