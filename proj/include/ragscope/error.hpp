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

#include <stdexcept>
#include <string>

namespace ragscope {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's precondition (empty input, k < 1, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent dataset file.
class DatasetError : public Error {
 public:
  DatasetError(const std::string& what, std::size_t line = 0)
      : Error(what), line_(line) {}
  /// 1-based line number, or 0 when the error is not tied to a line.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Bad configuration: missing API key, uncovered schema leaf, bad template.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Remote endpoint failure after retries, or a non-retryable response.
class GatewayError : public Error {
 public:
  GatewayError(const std::string& what, int status = 0)
      : Error(what), status_(status) {}
  /// HTTP status of the final attempt; 0 for transport-level failures.
  int status() const { return status_; }

 private:
  int status_;
};

/// An LLM completion could not be parsed into the expected structure.
class CompletionParseError : public Error {
 public:
  CompletionParseError(const std::string& what, std::string transcript)
      : Error(what), transcript_(std::move(transcript)) {}
  const std::string& transcript() const { return transcript_; }

 private:
  std::string transcript_;
};

}  // namespace ragscope
