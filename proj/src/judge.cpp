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

#include "ragscope/judge.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "ragscope/templates.hpp"
#include "ragscope/textproc.hpp"

namespace ragscope {
namespace {

constexpr std::string_view kOpen = "[[[";
constexpr std::string_view kClose = "]]]";

constexpr std::string_view kTestCaseMarker = "Test cases:";
constexpr std::string_view kAnswerMarker = "Generated Answer:";
constexpr std::string_view kKeypointsMarker = "\nStandard Answer Key Points:";
constexpr std::string_view kCountMarker = "Here are ";

std::optional<KeypointLabel> label_from_name(std::string_view name) {
  const auto folded = fold_case(normalize(name));
  if (folded == "relevant") return KeypointLabel::Covered;
  if (folded == "wrong") return KeypointLabel::Contradicted;
  if (folded == "irrelevant") return KeypointLabel::Untouched;
  return std::nullopt;
}

std::string format_reminder(std::size_t count) {
  return "\n\nFormat reminder: evaluate all " + std::to_string(count) +
         " key points in order and end each evaluation with exactly one of [[[Relevant]]], "
         "[[[Irrelevant]]] or [[[Wrong]]]. Do not repeat conclusions, so the total number of "
         "classifications is exactly " +
         std::to_string(count) + ".";
}

std::string strip_terminal_punctuation(std::string text) {
  static constexpr std::array<std::string_view, 8> kTails = {".", "!", "?", ";",
                                                             "。", "！", "？", "；"};
  for (bool again = true; again;) {
    again = false;
    for (auto tail : kTails) {
      if (text.size() >= tail.size() && text.ends_with(tail)) {
        text.resize(text.size() - tail.size());
        again = true;
      }
    }
    while (!text.empty() && text.back() == ' ') {
      text.pop_back();
      again = true;
    }
  }
  return text;
}

struct TestCase {
  std::string answer;
  std::vector<std::string> keypoints;
};

std::optional<TestCase> read_test_case(std::string_view prompt) {
  const auto section = prompt.rfind(kTestCaseMarker);
  if (section == std::string_view::npos) return std::nullopt;
  const auto body = prompt.substr(section);
  const auto answer_at = body.find(kAnswerMarker);
  if (answer_at == std::string_view::npos) return std::nullopt;
  const auto answer_begin = answer_at + kAnswerMarker.size();
  const auto answer_end = body.find(kKeypointsMarker, answer_begin);
  if (answer_end == std::string_view::npos) return std::nullopt;

  TestCase out;
  out.answer = std::string(body.substr(answer_begin, answer_end - answer_begin));
  const auto count_at = body.find(kCountMarker, answer_end);
  if (count_at == std::string_view::npos) return std::nullopt;
  std::size_t count = 0;
  std::size_t i = count_at + kCountMarker.size();
  while (i < body.size() && body[i] >= '0' && body[i] <= '9') {
    count = count * 10 + static_cast<std::size_t>(body[i] - '0');
    ++i;
  }
  std::size_t line = body.find('\n', i);
  for (std::size_t k = 1; k <= count; ++k) {
    if (line == std::string_view::npos) return std::nullopt;
    const auto next = body.find('\n', line + 1);
    auto text = body.substr(line + 1, next == std::string_view::npos ? std::string_view::npos
                                                                      : next - line - 1);
    const std::string prefix = std::to_string(k) + ". ";
    if (!text.starts_with(prefix)) return std::nullopt;
    out.keypoints.emplace_back(text.substr(prefix.size()));
    line = next;
  }
  return out;
}

}  // namespace

std::string_view to_string(KeypointLabel label) {
  switch (label) {
    case KeypointLabel::Covered: return "Covered";
    case KeypointLabel::Contradicted: return "Contradicted";
    case KeypointLabel::Untouched: return "Untouched";
  }
  return "?";
}

std::string_view judge_token(KeypointLabel label) {
  switch (label) {
    case KeypointLabel::Covered: return "[[[Relevant]]]";
    case KeypointLabel::Contradicted: return "[[[Wrong]]]";
    case KeypointLabel::Untouched: return "[[[Irrelevant]]]";
  }
  return "?";
}

std::vector<KeypointLabel> parse_judge_labels(std::string_view transcript,
                                              std::size_t expected_count) {
  if (expected_count < 1) throw PreconditionError("expected_count must be >= 1");
  std::vector<KeypointLabel> labels;
  std::size_t pos = 0;
  while (true) {
    const auto open = transcript.find(kOpen, pos);
    if (open == std::string_view::npos) break;
    // Skip over runs such as "[[[[" so the token starts at the last three.
    std::size_t start = open;
    while (start + kOpen.size() < transcript.size() && transcript[start + kOpen.size()] == '[') {
      ++start;
    }
    const auto name_begin = start + kOpen.size();
    const auto close = transcript.find(kClose, name_begin);
    if (close == std::string_view::npos) break;
    const auto name = transcript.substr(name_begin, close - name_begin);
    if (name.find_first_of("[]") != std::string_view::npos) {
      pos = name_begin;
      continue;
    }
    const auto label = label_from_name(name);
    if (!label) {
      throw JudgeParseError(JudgeParseError::Kind::UnknownLabel,
                            "unknown label [[[" + std::string(name) + "]]]",
                            std::string(transcript), labels.size(), expected_count);
    }
    labels.push_back(*label);
    pos = close + kClose.size();
  }
  if (labels.size() != expected_count) {
    throw JudgeParseError(JudgeParseError::Kind::CountMismatch,
                          "count mismatch (found " + std::to_string(labels.size()) +
                              ", expected " + std::to_string(expected_count) + ")",
                          std::string(transcript), labels.size(), expected_count);
  }
  return labels;
}

KeypointLabel MockJudge::classify(std::string_view answer, std::string_view keypoint) {
  const auto point = strip_terminal_punctuation(fold_case(normalize(keypoint)));
  if (point.empty()) return KeypointLabel::Untouched;
  const auto text = fold_case(normalize(answer));
  if (text.find("not " + point) != std::string::npos ||
      text.find("没有" + point) != std::string::npos) {
    return KeypointLabel::Contradicted;
  }
  if (text.find(point) != std::string::npos) return KeypointLabel::Covered;
  return KeypointLabel::Untouched;
}

std::string MockJudge::complete(const std::string& prompt) {
  const auto test_case = read_test_case(prompt);
  if (!test_case) return "The key points could not be identified in the request.";
  std::string out;
  for (std::size_t i = 0; i < test_case->keypoints.size(); ++i) {
    const auto label = classify(test_case->answer, test_case->keypoints[i]);
    out += "Key Point " + std::to_string(i + 1) + ":\n";
    switch (label) {
      case KeypointLabel::Covered:
        out += "Analysis: The generated answer states this key point.\n";
        break;
      case KeypointLabel::Contradicted:
        out += "Analysis: The generated answer negates this key point.\n";
        break;
      case KeypointLabel::Untouched:
        out += "Analysis: The generated answer does not mention this key point.\n";
        break;
    }
    out += "Conclusion: ";
    out += judge_token(label);
    out += '\n';
  }
  return out;
}

std::string GatewayJudge::complete(const std::string& prompt) {
  ChatRequest request = base_;
  request.user = prompt;
  return gateway_.chat_complete(request);
}

std::string render_judge_prompt(const PromptTemplate& tmpl, std::string_view question,
                                std::string_view answer,
                                std::span<const std::string> keypoints) {
  std::string numbered;
  for (std::size_t i = 0; i < keypoints.size(); ++i) {
    if (i > 0) numbered += '\n';
    numbered += std::to_string(i + 1) + ". " + normalize(keypoints[i]);
  }
  return tmpl.render({{"question", std::string(question)},
                      {"prediction", std::string(answer)},
                      {"key_points_num", std::to_string(keypoints.size())},
                      {"key_points", numbered}});
}

KeypointVerdicts classify_keypoints(std::string_view question, std::string_view answer,
                                    std::span<const std::string> keypoints,
                                    JudgeBackend& backend, const PromptTemplate& tmpl) {
  if (keypoints.empty()) throw PreconditionError("empty keypoint set");
  const auto prompt = render_judge_prompt(tmpl, question, answer, keypoints);
  KeypointVerdicts verdicts;
  verdicts.raw_transcript = backend.complete(prompt);
  try {
    verdicts.labels = parse_judge_labels(verdicts.raw_transcript, keypoints.size());
    return verdicts;
  } catch (const JudgeParseError&) {
  }
  const auto first = verdicts.raw_transcript;
  verdicts.raw_transcript = backend.complete(prompt + format_reminder(keypoints.size()));
  try {
    verdicts.labels = parse_judge_labels(verdicts.raw_transcript, keypoints.size());
  } catch (const JudgeParseError& e) {
    throw JudgeParseError(e.kind(), std::string(e.what()) + " after retry",
                          first + "\n----- retry -----\n" + verdicts.raw_transcript, e.found(),
                          e.expected());
  }
  return verdicts;
}

KeypointVerdicts classify_keypoints(std::string_view question, std::string_view answer,
                                    std::span<const std::string> keypoints,
                                    JudgeBackend& backend) {
  static const PromptTemplate kDefault = load_template(std::nullopt, kJudgeTemplate);
  return classify_keypoints(question, answer, keypoints, backend, kDefault);
}

}  // namespace ragscope
