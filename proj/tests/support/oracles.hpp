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

// Reference implementations written without the library's helpers, plus the
// synthetic corpus generator the property tests share. The oracles only
// understand the restricted text the generator emits: ASCII words, a fixed
// set of Han characters, plain terminators and no abbreviations.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ragscope/corpus.hpp"

namespace oracle {

using ragscope::Language;

inline bool ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

inline bool is_cn_terminator_at(const std::string& s, std::size_t i) {
  for (const char* t : {"\xE3\x80\x82", "\xEF\xBC\x81", "\xEF\xBC\x9F", "\xEF\xBC\x9B"}) {
    if (s.compare(i, 3, t) == 0) return true;
  }
  return false;
}

/// Collapses whitespace runs to one space and trims.
inline std::string squash(const std::string& s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

/// Sentences of generator text: a line break or a terminator run (followed by
/// whitespace or the end, for EN) closes a sentence.
inline std::vector<std::string> split(const std::string& text, Language lang) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    auto s = squash(current);
    if (!s.empty()) out.push_back(s);
    current.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n' || c == '\r') {
      flush();
      ++i;
      continue;
    }
    if (lang == Language::EN && (c == '.' || c == '!' || c == '?')) {
      std::size_t j = i;
      while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
      current.append(text, i, j - i);
      i = j;
      if (j == text.size() || text[j] == ' ' || text[j] == '\n' || text[j] == '\t') flush();
      continue;
    }
    if (lang == Language::CN && is_cn_terminator_at(text, i)) {
      while (i < text.size() && is_cn_terminator_at(text, i)) {
        current.append(text, i, 3);
        i += 3;
      }
      flush();
      continue;
    }
    current.push_back(c);
    ++i;
  }
  flush();
  return out;
}

/// Word tokens: lowercased ASCII alphanumeric runs, and every 3-byte UTF-8
/// character that is not a CN terminator (the generator only emits Han).
inline std::vector<std::string> words(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto byte = static_cast<unsigned char>(text[i]);
    if (byte >= 0xE0 && byte < 0xF0) {
      if (!is_cn_terminator_at(text, i)) out.push_back(text.substr(i, 3));
      i += 3;
      continue;
    }
    if (ascii_alnum(text[i])) {
      std::string w;
      while (i < text.size() && ascii_alnum(text[i])) {
        const char c = text[i++];
        w.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
      }
      out.push_back(w);
      continue;
    }
    ++i;
  }
  return out;
}

inline std::size_t word_count(const std::string& text) { return words(text).size(); }

/// A reference as the generator built it: its sentences are known.
struct Reference {
  std::string document_id;
  std::vector<std::string> sentences;
};

inline bool contains(const std::vector<std::string>& pool, const std::string& s) {
  for (const auto& p : pool) {
    if (p == s) return true;
  }
  return false;
}

/// Recall: matched when one retrieved text holds every sentence.
inline double recall(const std::vector<Reference>& refs, const std::vector<std::string>& retrieved,
                     Language lang) {
  std::size_t hits = 0;
  for (const auto& ref : refs) {
    bool matched = false;
    for (const auto& text : retrieved) {
      const auto pool = split(text, lang);
      bool all = true;
      for (const auto& s : ref.sentences) all = all && contains(pool, s);
      if (all) {
        matched = true;
        break;
      }
    }
    if (matched) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(refs.size());
}

/// EIR: sentences are matched against the pooled retrieved text.
inline double eir(const std::vector<Reference>& refs, const std::vector<std::string>& retrieved,
                  Language lang) {
  std::vector<std::string> pool;
  std::size_t denominator = 0;
  for (const auto& text : retrieved) {
    for (auto& s : split(text, lang)) pool.push_back(std::move(s));
    denominator += word_count(text);
  }
  std::size_t numerator = 0;
  for (const auto& ref : refs) {
    bool all = true;
    for (const auto& s : ref.sentences) all = all && contains(pool, s);
    if (!all) continue;
    for (const auto& s : ref.sentences) numerator += word_count(s);
  }
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

/// Okapi BM25 evaluated term by term over explicit token lists.
inline double bm25(const std::vector<std::vector<std::string>>& corpus,
                   const std::vector<std::string>& query, std::size_t doc) {
  const double k1 = 1.2;
  const double b = 0.75;
  const double n = static_cast<double>(corpus.size());
  double total_len = 0;
  for (const auto& c : corpus) total_len += static_cast<double>(c.size());
  const double avg = total_len / n;
  double score = 0;
  for (const auto& term : query) {
    double df = 0;
    for (const auto& c : corpus) {
      if (std::find(c.begin(), c.end(), term) != c.end()) df += 1;
    }
    const double tf = static_cast<double>(std::count(corpus[doc].begin(), corpus[doc].end(), term));
    if (tf == 0) continue;
    const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    const double len = static_cast<double>(corpus[doc].size());
    score += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avg));
  }
  return score;
}

/// Longest common subsequence through the full (m+1)x(n+1) table.
inline std::size_t lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1 : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t[a.size()][b.size()];
}

inline double rouge_l(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  if (cand.empty() || ref.empty()) return 0.0;
  const double l = static_cast<double>(lcs(cand, ref));
  if (l == 0) return 0.0;
  const double p = l / static_cast<double>(cand.size());
  const double r = l / static_cast<double>(ref.size());
  return 2 * p * r / (p + r);
}

/// Sentence BLEU-4 with uniform weights. For n >= 2 a zero match count is
/// replaced by 1 / (candidate n-grams + 1); no unigram overlap gives 0.
inline double bleu(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  if (cand.empty() || ref.empty()) return 0.0;
  double log_sum = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    if (cand.size() < n) {
      if (n == 1) return 0.0;
      log_sum += std::log(1.0);  // no candidate n-grams: 1 / (0 + 1)
      continue;
    }
    const std::size_t total = cand.size() - n + 1;
    std::vector<bool> used(ref.size() >= n ? ref.size() - n + 1 : 0, false);
    std::size_t matched = 0;
    for (std::size_t i = 0; i < total; ++i) {
      for (std::size_t j = 0; j < used.size(); ++j) {
        if (used[j]) continue;
        if (std::equal(cand.begin() + i, cand.begin() + i + n, ref.begin() + j)) {
          used[j] = true;
          ++matched;
          break;
        }
      }
    }
    if (matched == 0 && n == 1) return 0.0;
    const double p = matched == 0 ? 1.0 / (static_cast<double>(total) + 1)
                                  : static_cast<double>(matched) / static_cast<double>(total);
    log_sum += std::log(p);
  }
  const double c = static_cast<double>(cand.size());
  const double r = static_cast<double>(ref.size());
  const double bp = c < r ? std::exp(1 - r / c) : 1.0;
  return bp * std::exp(log_sum / 4);
}

// ---------------------------------------------------------------------------
// Synthetic corpora built from a closed sentence pool.

struct SyntheticQuery {
  std::string question;
  std::vector<Reference> references;
};

struct SyntheticCorpus {
  Language language = Language::EN;
  std::vector<ragscope::Document> documents;
  std::vector<SyntheticQuery> queries;
  std::size_t chunk_size = 16;
  bool with_meta = false;
};

inline const std::vector<std::string>& en_vocabulary() {
  static const std::vector<std::string> v = {
      "river", "stone", "lamp",  "court",  "ledger", "harbor", "winter", "copper", "signal",
      "garden", "bridge", "orbit", "paper", "market", "engine", "valley", "silver", "thread",
      "forest", "window", "anchor", "report", "grain",  "tower",  "cable",  "meadow", "pilot"};
  return v;
}

inline const std::vector<std::string>& cn_vocabulary() {
  static const std::vector<std::string> v = {
      "\xE5\xB1\xB1", "\xE6\xB0\xB4", "\xE4\xBA\xBA", "\xE5\xA4\xA9", "\xE5\x9C\xB0",
      "\xE6\x9C\xA8", "\xE7\x81\xAB", "\xE9\x87\x91", "\xE5\x9C\x9F", "\xE6\x9C\x88",
      "\xE6\x97\xA5", "\xE9\xA3\x8E", "\xE4\xBA\x91", "\xE9\x9B\xA8", "\xE7\x9F\xB3",
      "\xE8\x8A\xB1", "\xE8\x8D\x89", "\xE9\xB8\x9F", "\xE9\xB1\xBC", "\xE9\x97\xA8"};
  return v;
}

/// Seeded corpus: a pool of distinct sentences, documents drawn from the
/// pool, and queries whose references are runs of consecutive sentences.
inline SyntheticCorpus make_corpus(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 17);
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  SyntheticCorpus corpus;
  corpus.language = seed % 3 == 2 ? Language::CN : Language::EN;
  corpus.chunk_size = pick(4, 40);
  corpus.with_meta = seed % 4 == 1;
  const bool en = corpus.language == Language::EN;
  const auto& vocab = en ? en_vocabulary() : cn_vocabulary();

  std::set<std::string> seen;
  std::vector<std::string> pool;
  const std::size_t pool_size = pick(8, 30);
  while (pool.size() < pool_size) {
    const std::size_t len = pick(3, 8);
    std::string s;
    for (std::size_t w = 0; w < len; ++w) {
      std::string word = vocab[pick(0, vocab.size() - 1)];
      if (en && w == 0) word[0] = static_cast<char>(word[0] - 'a' + 'A');
      if (en && w > 0) s.push_back(' ');
      s += word;
    }
    if (en) {
      s += std::vector<std::string>{".", "!", "?"}[pick(0, 2)];
    } else {
      s += std::vector<std::string>{"\xE3\x80\x82", "\xEF\xBC\x81", "\xEF\xBC\x9F"}[pick(0, 2)];
    }
    if (seen.insert(s).second) pool.push_back(s);
  }

  const std::size_t n_docs = pick(1, 6);
  std::vector<std::vector<std::string>> doc_sentences;
  for (std::size_t d = 0; d < n_docs; ++d) {
    ragscope::Document doc;
    doc.id = "doc" + std::to_string(d);
    doc.language = corpus.language;
    doc.scenario = "synthetic";
    if (corpus.with_meta) doc.meta = {{"topic", "t" + std::to_string(d)}};
    std::vector<std::string> sentences;
    const std::size_t n = pick(2, 25);
    for (std::size_t i = 0; i < n; ++i) {
      sentences.push_back(pool[pick(0, pool.size() - 1)]);
      if (i > 0) {
        const std::size_t sep = pick(0, 5);
        doc.text += sep == 0 ? "\n" : sep == 1 ? "\n\n" : en ? " " : (sep == 2 ? " " : "");
      }
      doc.text += sentences.back();
    }
    doc_sentences.push_back(std::move(sentences));
    corpus.documents.push_back(std::move(doc));
  }

  const std::size_t n_queries = pick(1, 6);
  for (std::size_t q = 0; q < n_queries; ++q) {
    SyntheticQuery query;
    const std::size_t n_refs = pick(1, 4);
    for (std::size_t r = 0; r < n_refs; ++r) {
      const std::size_t d = pick(0, n_docs - 1);
      const auto& sentences = doc_sentences[d];
      const std::size_t begin = pick(0, sentences.size() - 1);
      const std::size_t end = std::min(sentences.size(), begin + pick(1, 3));
      Reference ref{corpus.documents[d].id, {}};
      for (std::size_t i = begin; i < end; ++i) ref.sentences.push_back(sentences[i]);
      for (std::size_t w = 0; w < 2; ++w) {
        const auto ws = words(ref.sentences.front());
        query.question += ws[pick(0, ws.size() - 1)] + " ";
      }
      query.references.push_back(std::move(ref));
    }
    for (std::size_t w = 0; w < pick(0, 3); ++w) query.question += vocab[pick(0, vocab.size() - 1)] + " ";
    corpus.queries.push_back(std::move(query));
  }
  return corpus;
}

/// The reference text as a dataset would store it.
inline std::string reference_text(const Reference& ref, Language lang) {
  std::string out;
  for (const auto& s : ref.sentences) {
    if (!out.empty() && lang == Language::EN) out.push_back(' ');
    out += s;
  }
  return out;
}

inline std::vector<ragscope::GroundTruthReference> to_references(const std::vector<Reference>& refs,
                                                                 Language lang) {
  std::vector<ragscope::GroundTruthReference> out;
  for (const auto& r : refs) out.push_back({r.document_id, reference_text(r, lang)});
  return out;
}

}  // namespace oracle
