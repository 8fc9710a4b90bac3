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
#include <vector>

#include "ragscope/corpus.hpp"

namespace ragscope {

struct MatchOutcome {
  std::size_t reference_index = 0;
  bool matched = false;
  /// Words of the reference's matched sentences; 0 when unmatched.
  std::size_t matched_word_count = 0;

  bool operator==(const MatchOutcome&) const = default;
};

struct RecallResult {
  std::size_t matched = 0;
  std::size_t total = 0;
  std::vector<MatchOutcome> outcomes;

  double value() const { return static_cast<double>(matched) / static_cast<double>(total); }
};

struct EirResult {
  std::size_t matched_words = 0;
  std::size_t retrieved_words = 0;
  std::vector<MatchOutcome> outcomes;

  double value() const {
    return static_cast<double>(matched_words) / static_cast<double>(retrieved_words);
  }
};

/// Fraction of references every sentence of which equals (after
/// normalization) some sentence of one single retrieved text.
RecallResult compute_recall(std::span<const GroundTruthReference> references,
                            std::span<const std::string> retrieved, Language lang);

/// Matched reference words over total retrieved words. A reference counts
/// when each of its sentences equals a sentence of some retrieved text (the
/// retrieved passages taken together); it then contributes the word count of
/// its sentences. The denominator counts every word of every retrieved text.
EirResult compute_eir(std::span<const GroundTruthReference> references,
                      std::span<const std::string> retrieved, Language lang);

}  // namespace ragscope
