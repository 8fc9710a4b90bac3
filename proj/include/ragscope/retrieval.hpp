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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ragscope/corpus.hpp"
#include "ragscope/textproc.hpp"

namespace ragscope {

inline constexpr std::size_t kDefaultChunkSize = 512;
inline constexpr std::size_t kDefaultTopK = 5;
inline constexpr std::size_t kMaxQueryTokens = 128;
inline constexpr double kBm25K1 = 1.2;
inline constexpr double kBm25B = 0.75;

/// A window of a document's token stream. `body` is the raw document text
/// from the first token of this window up to the first token of the next
/// one, so the bodies of a document's chunks concatenate back to its text.
struct Chunk {
  std::string id;
  std::string document_id;
  Language language = Language::EN;
  std::size_t token_begin = 0;
  std::size_t token_end = 0;
  TextSpan body_span;
  /// "key: value" lines of the document meta, or empty.
  std::string meta_prefix;
  std::string body;

  std::size_t token_count() const { return token_end - token_begin; }
  std::string render() const { return meta_prefix + body; }
};

/// Greedy fixed-size windows over the document tokens; the last window may
/// be short. Meta lines do not count against `chunk_size`.
std::vector<Chunk> chunk_document(const Document& doc, std::size_t chunk_size,
                                  bool with_meta);

enum class RetrieverKind { Bm25, Embedding };

std::string_view to_string(RetrieverKind kind);
RetrieverKind parse_retriever_kind(std::string_view text);

struct RetrieverSpec {
  RetrieverKind kind = RetrieverKind::Bm25;
  std::size_t chunk_size = kDefaultChunkSize;
  std::size_t top_k = kDefaultTopK;
  /// Embedding endpoint base URL; unused for BM25.
  std::optional<std::string> endpoint;
  std::string embedding_model = "bge-m3";

  void validate() const;
};

/// Turns texts into dense vectors, one per input, in order.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<std::vector<float>> embed(std::span<const std::string> texts) = 0;
};

struct ScoredChunk {
  std::string chunk_id;
  double score = 0.0;

  bool operator==(const ScoredChunk&) const = default;
};

struct RetrievalResult {
  std::string query_id;
  /// Non-increasing score; equal scores ordered by ascending chunk id.
  std::vector<ScoredChunk> ranked;
};

/// Immutable retrieval index over a fixed chunk set. Safe to query from
/// several threads once built, provided the embedder (if any) is.
class Index {
 public:
  RetrieverKind kind() const { return kind_; }
  const std::vector<Chunk>& chunks() const { return chunks_; }
  std::size_t size() const { return chunks_.size(); }
  const Chunk* find_chunk(std::string_view id) const;
  std::optional<std::size_t> chunk_position(std::string_view id) const;

  std::size_t document_frequency(const std::string& term) const;
  /// Term frequency of `term` in the chunk at `position`.
  std::size_t term_frequency(const std::string& term, std::size_t position) const;
  std::size_t chunk_length(std::size_t position) const { return lengths_[position]; }
  double average_length() const { return average_length_; }

  const std::vector<std::vector<float>>& embeddings() const { return embeddings_; }
  Embedder* embedder() const { return embedder_; }

 private:
  struct Posting {
    std::uint32_t chunk;
    std::uint32_t tf;
  };

  friend Index build_index(std::vector<Chunk> chunks, const RetrieverSpec& spec,
                           Embedder* embedder);
  friend RetrievalResult retrieve_topk(const Index& index, std::string_view query,
                                       std::size_t k, Language lang);

  RetrieverKind kind_ = RetrieverKind::Bm25;
  std::vector<Chunk> chunks_;
  std::unordered_map<std::string, std::size_t> positions_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  std::vector<std::size_t> lengths_;
  double average_length_ = 0.0;
  std::vector<std::vector<float>> embeddings_;
  Embedder* embedder_ = nullptr;
};

/// BM25 indexes the tokens of each chunk's render (meta prefix included).
/// Embedding indexes fetch one vector per render from `embedder` and
/// L2-normalize it; the embedder must outlive the index.
Index build_index(std::vector<Chunk> chunks, const RetrieverSpec& spec,
                  Embedder* embedder = nullptr);

/// Okapi BM25 with k1 = 1.2, b = 0.75 and idf = ln((N - df + 0.5)/(df + 0.5) + 1).
/// Repeated query tokens contribute once per occurrence.
double bm25_score(const Index& index, std::span<const std::string> query_tokens,
                  std::string_view chunk_id);

/// Top-k chunks for `query`, truncated to its first 128 tokens. Uses BM25 or
/// cosine similarity depending on the index kind.
RetrievalResult retrieve_topk(const Index& index, std::string_view query, std::size_t k,
                              Language lang);

}  // namespace ragscope
