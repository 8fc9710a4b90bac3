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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragscope/error.hpp"
#include "ragscope/llm_gateway.hpp"
#include "ragscope/prompt_template.hpp"

namespace ragscope {

enum class KeypointLabel { Covered, Contradicted, Untouched };

std::string_view to_string(KeypointLabel label);
/// [[[Relevant]]], [[[Wrong]]] or [[[Irrelevant]]].
std::string_view judge_token(KeypointLabel label);

struct KeypointVerdicts {
  std::string record_id;
  /// One label per keypoint, in keypoint order.
  std::vector<KeypointLabel> labels;
  std::string raw_transcript;
};

class JudgeParseError : public CompletionParseError {
 public:
  enum class Kind { CountMismatch, UnknownLabel };

  JudgeParseError(Kind kind, const std::string& what, std::string transcript,
                  std::size_t found = 0, std::size_t expected = 0)
      : CompletionParseError(what, std::move(transcript)),
        kind_(kind), found_(found), expected_(expected) {}

  Kind kind() const { return kind_; }
  std::size_t found() const { return found_; }
  std::size_t expected() const { return expected_; }

 private:
  Kind kind_;
  std::size_t found_;
  std::size_t expected_;
};

/// Scans `[[[...]]]` tokens in order. Returns exactly `expected_count`
/// labels or throws JudgeParseError; never a partial list. Token names are
/// matched case-insensitively after trimming.
std::vector<KeypointLabel> parse_judge_labels(std::string_view transcript,
                                              std::size_t expected_count);

/// A single text-in, text-out judge call.
class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

/// Offline judge. Reads the question's test case back out of the rendered
/// evaluation prompt and labels each keypoint by substring rules on
/// normalized, case-folded text: Contradicted when the answer contains the
/// keypoint right after "not " or "没有", Covered when it contains the
/// keypoint, Untouched otherwise.
class MockJudge : public JudgeBackend {
 public:
  std::string complete(const std::string& prompt) override;

  static KeypointLabel classify(std::string_view answer, std::string_view keypoint);
};

/// Judge served by a chat model through the gateway.
class GatewayJudge : public JudgeBackend {
 public:
  /// `base` carries model and sampling settings; its user text is replaced.
  GatewayJudge(Gateway& gateway, ChatRequest base)
      : gateway_(gateway), base_(std::move(base)) {}
  std::string complete(const std::string& prompt) override;

 private:
  Gateway& gateway_;
  ChatRequest base_;
};

std::string render_judge_prompt(const PromptTemplate& tmpl, std::string_view question,
                                std::string_view answer,
                                std::span<const std::string> keypoints);

/// Renders the prompt, calls the backend once and parses the labels. On a
/// parse failure it retries once with a format reminder appended; a second
/// failure throws JudgeParseError carrying both transcripts.
KeypointVerdicts classify_keypoints(std::string_view question, std::string_view answer,
                                    std::span<const std::string> keypoints,
                                    JudgeBackend& backend, const PromptTemplate& tmpl);

/// Same, with the compiled-in evaluation template.
KeypointVerdicts classify_keypoints(std::string_view question, std::string_view answer,
                                    std::span<const std::string> keypoints,
                                    JudgeBackend& backend);

}  // namespace ragscope
