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

#include "ragscope/retrieval_metrics.hpp"

#include <algorithm>
#include <unordered_set>

#include "ragscope/error.hpp"
#include "ragscope/textproc.hpp"

namespace ragscope {
namespace {

using SentenceSet = std::unordered_set<std::string>;

SentenceSet sentence_set(const std::string& text, Language lang) {
  SentenceSet out;
  for (auto& s : split_sentences(text, lang)) out.insert(std::move(s.text));
  return out;
}

bool all_in(const std::vector<Sentence>& sentences, const SentenceSet& set) {
  return std::all_of(sentences.begin(), sentences.end(),
                     [&](const Sentence& s) { return set.contains(s.text); });
}

}  // namespace

RecallResult compute_recall(std::span<const GroundTruthReference> references,
                            std::span<const std::string> retrieved, Language lang) {
  if (references.empty()) throw PreconditionError("empty references list");
  std::vector<SentenceSet> passages;
  passages.reserve(retrieved.size());
  for (const auto& text : retrieved) passages.push_back(sentence_set(text, lang));

  RecallResult result;
  result.total = references.size();
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto sentences = split_sentences(references[i].text, lang);
    MatchOutcome outcome{i, false, 0};
    if (!sentences.empty()) {
      outcome.matched = std::any_of(passages.begin(), passages.end(),
                                    [&](const SentenceSet& p) { return all_in(sentences, p); });
    }
    if (outcome.matched) {
      ++result.matched;
      for (const auto& s : sentences) outcome.matched_word_count += count_words(s.text, lang);
    }
    result.outcomes.push_back(outcome);
  }
  return result;
}

EirResult compute_eir(std::span<const GroundTruthReference> references,
                      std::span<const std::string> retrieved, Language lang) {
  if (retrieved.empty()) throw PreconditionError("empty retrieved list");
  EirResult result;
  SentenceSet pooled;
  for (const auto& text : retrieved) {
    result.retrieved_words += count_words(text, lang);
    for (auto& s : split_sentences(text, lang)) pooled.insert(std::move(s.text));
  }
  if (result.retrieved_words == 0) throw PreconditionError("retrieved passages contain no words");

  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto sentences = split_sentences(references[i].text, lang);
    MatchOutcome outcome{i, !sentences.empty() && all_in(sentences, pooled), 0};
    if (outcome.matched) {
      for (const auto& s : sentences) outcome.matched_word_count += count_words(s.text, lang);
      result.matched_words += outcome.matched_word_count;
    }
    result.outcomes.push_back(outcome);
  }
  return result;
}

}  // namespace ragscope
