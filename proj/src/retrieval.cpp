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

#include "ragscope/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ragscope/error.hpp"

namespace ragscope {
namespace {

std::string chunk_id(const std::string& document_id, std::size_t ordinal) {
  char suffix[16];
  std::snprintf(suffix, sizeof(suffix), "#%04zu", ordinal);
  return document_id + suffix;
}

std::string render_meta(const Document& doc) {
  std::string out;
  for (const auto& [key, value] : doc.meta) {
    out += key;
    out += ": ";
    out += value;
    out += '\n';
  }
  return out;
}

void normalize_in_place(std::vector<float>& v, const std::string& what) {
  double norm = 0.0;
  for (float x : v) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (norm == 0.0 || !std::isfinite(norm)) {
    throw GatewayError("zero-vector embedding for " + what);
  }
  for (float& x : v) x = static_cast<float>(x / norm);
}

bool ranks_before(const ScoredChunk& a, const ScoredChunk& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.chunk_id < b.chunk_id;
}

double idf(std::size_t n, std::size_t df) {
  return std::log((static_cast<double>(n) - df + 0.5) / (df + 0.5) + 1.0);
}

double term_weight(double idf_value, std::size_t tf, std::size_t length, double avg) {
  const double tfd = static_cast<double>(tf);
  const double norm = avg > 0.0 ? static_cast<double>(length) / avg : 0.0;
  return idf_value * tfd * (kBm25K1 + 1.0) / (tfd + kBm25K1 * (1.0 - kBm25B + kBm25B * norm));
}

std::string_view truncate_query(std::string_view query, const std::vector<Token>& tokens) {
  if (tokens.size() <= kMaxQueryTokens) return query;
  return query.substr(0, tokens[kMaxQueryTokens - 1].span.end);
}

}  // namespace

std::vector<Chunk> chunk_document(const Document& doc, std::size_t chunk_size,
                                  bool with_meta) {
  if (chunk_size < 1) throw PreconditionError("chunk_size must be >= 1");
  const auto tokens = tokenize_with_spans(doc.text, doc.language);
  if (tokens.empty()) throw PreconditionError("empty document: " + doc.id);
  const std::string meta = with_meta ? render_meta(doc) : std::string();

  std::vector<Chunk> out;
  for (std::size_t begin = 0; begin < tokens.size(); begin += chunk_size) {
    Chunk chunk;
    chunk.id = chunk_id(doc.id, out.size());
    chunk.document_id = doc.id;
    chunk.language = doc.language;
    chunk.token_begin = begin;
    chunk.token_end = std::min(begin + chunk_size, tokens.size());
    chunk.body_span.begin = begin == 0 ? 0 : tokens[begin].span.begin;
    chunk.body_span.end =
        chunk.token_end == tokens.size() ? doc.text.size() : tokens[chunk.token_end].span.begin;
    chunk.meta_prefix = meta;
    chunk.body = doc.text.substr(chunk.body_span.begin, chunk.body_span.size());
    out.push_back(std::move(chunk));
  }
  return out;
}

std::string_view to_string(RetrieverKind kind) {
  return kind == RetrieverKind::Bm25 ? "bm25" : "embedding";
}

RetrieverKind parse_retriever_kind(std::string_view text) {
  if (text == "bm25" || text == "BM25") return RetrieverKind::Bm25;
  if (text == "embedding" || text == "Embedding") return RetrieverKind::Embedding;
  throw PreconditionError("unknown retriever '" + std::string(text) + "'");
}

void RetrieverSpec::validate() const {
  if (chunk_size < 1) throw PreconditionError("chunk_size must be >= 1");
  if (top_k < 1) throw PreconditionError("top_k must be >= 1");
}

const Chunk* Index::find_chunk(std::string_view id) const {
  const auto pos = chunk_position(id);
  return pos ? &chunks_[*pos] : nullptr;
}

std::optional<std::size_t> Index::chunk_position(std::string_view id) const {
  const auto it = positions_.find(std::string(id));
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

std::size_t Index::document_frequency(const std::string& term) const {
  const auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

std::size_t Index::term_frequency(const std::string& term, std::size_t position) const {
  const auto it = postings_.find(term);
  if (it == postings_.end()) return 0;
  const auto& list = it->second;
  const auto hit = std::lower_bound(
      list.begin(), list.end(), position,
      [](const Posting& p, std::size_t value) { return p.chunk < value; });
  return hit != list.end() && hit->chunk == position ? hit->tf : 0;
}

Index build_index(std::vector<Chunk> chunks, const RetrieverSpec& spec, Embedder* embedder) {
  spec.validate();
  if (chunks.empty()) throw PreconditionError("empty corpus");
  Index index;
  index.kind_ = spec.kind;
  index.chunks_ = std::move(chunks);
  for (std::size_t i = 0; i < index.chunks_.size(); ++i) {
    if (!index.positions_.emplace(index.chunks_[i].id, i).second) {
      throw PreconditionError("duplicate chunk id " + index.chunks_[i].id);
    }
  }

  if (spec.kind == RetrieverKind::Bm25) {
    std::size_t total = 0;
    index.lengths_.reserve(index.chunks_.size());
    for (std::size_t i = 0; i < index.chunks_.size(); ++i) {
      const auto& chunk = index.chunks_[i];
      const auto tokens = tokenize(chunk.render(), chunk.language);
      std::unordered_map<std::string, std::uint32_t> tf;
      for (const auto& t : tokens) ++tf[t];
      for (auto& [term, count] : tf) {
        index.postings_[term].push_back({static_cast<std::uint32_t>(i), count});
      }
      index.lengths_.push_back(tokens.size());
      total += tokens.size();
    }
    index.average_length_ = static_cast<double>(total) / index.chunks_.size();
    return index;
  }

  if (embedder == nullptr) throw ConfigError("embedding retriever requires an embedder");
  std::vector<std::string> renders;
  renders.reserve(index.chunks_.size());
  for (const auto& chunk : index.chunks_) renders.push_back(chunk.render());
  index.embeddings_ = embedder->embed(renders);
  if (index.embeddings_.size() != renders.size()) {
    throw GatewayError("response cardinality mismatch");
  }
  for (std::size_t i = 0; i < index.embeddings_.size(); ++i) {
    normalize_in_place(index.embeddings_[i], "chunk " + index.chunks_[i].id);
  }
  index.embedder_ = embedder;
  return index;
}

double bm25_score(const Index& index, std::span<const std::string> query_tokens,
                  std::string_view chunk_id) {
  if (index.kind() != RetrieverKind::Bm25) throw PreconditionError("not a BM25 index");
  const auto pos = index.chunk_position(chunk_id);
  if (!pos) throw PreconditionError("unknown chunk_id " + std::string(chunk_id));
  const std::size_t n = index.size();
  double score = 0.0;
  for (const auto& term : query_tokens) {
    const std::size_t tf = index.term_frequency(term, *pos);
    if (tf == 0) continue;
    score += term_weight(idf(n, index.document_frequency(term)), tf, index.chunk_length(*pos),
                         index.average_length());
  }
  return score;
}

RetrievalResult retrieve_topk(const Index& index, std::string_view query, std::size_t k,
                              Language lang) {
  if (k < 1) throw PreconditionError("k must be >= 1");
  const std::size_t n = index.size();
  std::vector<double> scores(n, 0.0);
  const auto tokens = tokenize_with_spans(query, lang);

  if (index.kind_ == RetrieverKind::Bm25) {
    const std::size_t used = std::min(tokens.size(), kMaxQueryTokens);
    for (std::size_t q = 0; q < used; ++q) {
      const auto it = index.postings_.find(tokens[q].text);
      if (it == index.postings_.end()) continue;
      const double w = idf(n, it->second.size());
      for (const auto& posting : it->second) {
        scores[posting.chunk] += term_weight(w, posting.tf, index.lengths_[posting.chunk],
                                             index.average_length_);
      }
    }
  } else {
    if (index.embedder_ == nullptr) throw ConfigError("embedding index has no embedder");
    const std::string text(truncate_query(query, tokens));
    if (normalize(text).empty()) throw PreconditionError("empty query");
    auto vectors = index.embedder_->embed(std::span<const std::string>(&text, 1));
    if (vectors.size() != 1) throw GatewayError("response cardinality mismatch");
    auto& q = vectors.front();
    normalize_in_place(q, "query");
    for (std::size_t i = 0; i < n; ++i) {
      const auto& v = index.embeddings_[i];
      if (v.size() != q.size()) throw GatewayError("embedding dimension mismatch");
      double dot = 0.0;
      for (std::size_t d = 0; d < q.size(); ++d) dot += static_cast<double>(q[d]) * v[d];
      scores[i] = dot;
    }
  }

  std::vector<ScoredChunk> all;
  all.reserve(n);
  for (std::size_t i = 0; i < n; ++i) all.push_back({index.chunks_[i].id, scores[i]});
  const std::size_t take = std::min(k, n);
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                    ranks_before);
  all.resize(take);
  return {{}, std::move(all)};
}

}  // namespace ragscope
