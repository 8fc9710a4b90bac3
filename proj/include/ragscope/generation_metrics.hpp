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
#include <string_view>

#include "ragscope/corpus.hpp"
#include "ragscope/judge.hpp"

namespace ragscope {

/// Keypoint-level generation scores. The three fractions share the
/// denominator `total`, so they always sum to one exactly.
struct GenMetricTriple {
  std::size_t covered = 0;
  std::size_t contradicted = 0;
  std::size_t untouched = 0;
  std::size_t total = 0;

  double completeness() const { return static_cast<double>(covered) / total; }
  double hallucination() const { return static_cast<double>(contradicted) / total; }
  double irrelevancy() const { return static_cast<double>(untouched) / total; }

  bool operator==(const GenMetricTriple&) const = default;
};

/// Throws PreconditionError on an empty label list.
GenMetricTriple compute_keypoint_metrics(std::span<const KeypointLabel> labels);
GenMetricTriple compute_keypoint_metrics(const KeypointVerdicts& verdicts);

/// F1 over the longest common token subsequence; 0 when either side is empty.
double rouge_l(std::string_view candidate, std::string_view reference, Language lang);
double rouge_l_tokens(std::span<const std::string> candidate,
                      std::span<const std::string> reference);

/// Sentence BLEU-4 with uniform weights. An n-gram order n >= 2 with no
/// matches contributes 1 / (candidate n-grams + 1). Brevity penalty
/// exp(1 - r / c) when the candidate is shorter than the reference.
double bleu(std::string_view candidate, std::string_view reference, Language lang);
double bleu_tokens(std::span<const std::string> candidate,
                   std::span<const std::string> reference);

}  // namespace ragscope
