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

#include "ragscope/generation_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "ragscope/error.hpp"
#include "ragscope/textproc.hpp"

namespace ragscope {
namespace {

std::map<std::vector<std::string>, std::size_t> ngram_counts(std::span<const std::string> tokens,
                                                             std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + i, tokens.begin() + i + n)];
  }
  return counts;
}

}  // namespace

GenMetricTriple compute_keypoint_metrics(std::span<const KeypointLabel> labels) {
  if (labels.empty()) throw PreconditionError("empty labels");
  GenMetricTriple out;
  for (auto label : labels) {
    switch (label) {
      case KeypointLabel::Covered: ++out.covered; break;
      case KeypointLabel::Contradicted: ++out.contradicted; break;
      case KeypointLabel::Untouched: ++out.untouched; break;
    }
  }
  out.total = labels.size();
  return out;
}

GenMetricTriple compute_keypoint_metrics(const KeypointVerdicts& verdicts) {
  return compute_keypoint_metrics(verdicts.labels);
}

double rouge_l_tokens(std::span<const std::string> candidate,
                      std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  // Two-row LCS table over the reference.
  std::vector<std::size_t> prev(reference.size() + 1, 0), cur(reference.size() + 1, 0);
  for (const auto& c : candidate) {
    for (std::size_t j = 1; j <= reference.size(); ++j) {
      cur[j] = c == reference[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev.back());
  if (lcs == 0) return 0.0;
  const double p = lcs / candidate.size();
  const double r = lcs / reference.size();
  return 2 * p * r / (p + r);
}

double rouge_l(std::string_view candidate, std::string_view reference, Language lang) {
  const auto c = tokenize(candidate, lang);
  const auto r = tokenize(reference, lang);
  return rouge_l_tokens(c, r);
}

double bleu_tokens(std::span<const std::string> candidate,
                   std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  double log_sum = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto cand = ngram_counts(candidate, n);
    const auto ref = ngram_counts(reference, n);
    std::size_t total = 0, matched = 0;
    for (const auto& [gram, count] : cand) {
      total += count;
      if (auto it = ref.find(gram); it != ref.end()) matched += std::min(count, it->second);
    }
    double p;
    if (matched > 0) {
      p = static_cast<double>(matched) / total;
    } else if (n == 1) {
      return 0.0;
    } else {
      p = 1.0 / (total + 1);
    }
    log_sum += std::log(p) / 4;
  }
  const double c = candidate.size();
  const double r = reference.size();
  const double bp = c < r ? std::exp(1 - r / c) : 1.0;
  return std::clamp(bp * std::exp(log_sum), 0.0, 1.0);
}

double bleu(std::string_view candidate, std::string_view reference, Language lang) {
  const auto c = tokenize(candidate, lang);
  const auto r = tokenize(reference, lang);
  return bleu_tokens(c, r);
}

}  // namespace ragscope
