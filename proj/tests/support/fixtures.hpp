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

// Glue between the synthetic corpora and the library under test.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ragscope/retrieval.hpp"

#ifndef RAGSCOPE_SOURCE_DIR
#error "RAGSCOPE_SOURCE_DIR must point at the source tree"
#endif

namespace fixtures {

inline std::filesystem::path source_dir() { return RAGSCOPE_SOURCE_DIR; }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::vector<ragscope::Chunk> chunk_all(const oracle::SyntheticCorpus& corpus) {
  std::vector<ragscope::Chunk> chunks;
  for (const auto& doc : corpus.documents) {
    auto part = ragscope::chunk_document(doc, corpus.chunk_size, corpus.with_meta);
    chunks.insert(chunks.end(), part.begin(), part.end());
  }
  return chunks;
}

inline ragscope::Index index_of(const oracle::SyntheticCorpus& corpus) {
  return ragscope::build_index(chunk_all(corpus), {});
}

/// Bodies of the top-k chunks, which is what the evaluation scores.
inline std::vector<std::string> retrieved_bodies(const ragscope::Index& index,
                                                 const std::string& query, std::size_t k,
                                                 ragscope::Language lang) {
  std::vector<std::string> out;
  for (const auto& hit : ragscope::retrieve_topk(index, query, k, lang).ranked) {
    out.push_back(index.find_chunk(hit.chunk_id)->body);
  }
  return out;
}

/// Full rendered chunks, meta lines included.
inline std::vector<std::string> retrieved_renders(const ragscope::Index& index,
                                                  const std::string& query, std::size_t k,
                                                  ragscope::Language lang) {
  std::vector<std::string> out;
  for (const auto& hit : ragscope::retrieve_topk(index, query, k, lang).ranked) {
    out.push_back(index.find_chunk(hit.chunk_id)->render());
  }
  return out;
}

}  // namespace fixtures
