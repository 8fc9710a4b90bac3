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
#include <string>
#include <string_view>
#include <vector>

#include "ragscope/corpus.hpp"

namespace ragscope {

/// Half-open byte range into a UTF-8 string.
struct TextSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const TextSpan&) const = default;
};

struct Sentence {
  /// Normalized text (see normalize()).
  std::string text;
  /// Raw span in the source, trimmed of surrounding whitespace.
  TextSpan span;
};

struct Token {
  std::string text;
  TextSpan span;
};

/// Unicode NFC.
std::string nfc(std::string_view text);

/// NFC, then every whitespace run collapsed to one ASCII space, then trimmed.
/// This is the equality used when comparing sentences across texts.
std::string normalize(std::string_view text);

/// Full Unicode lowercasing.
std::string fold_case(std::string_view text);

/// Rule-based segmentation.
///
/// EN ends a sentence at a run of `. ! ?` (plus trailing closing quotes or
/// brackets) that is followed by whitespace or end of text, unless the
/// period closes a known abbreviation or a single-capital initial. CN ends
/// a sentence at `。！？；` unconditionally. In both languages a line break ends the current
/// sentence, and trailing text without a terminator forms a final sentence.
std::vector<Sentence> split_sentences(std::string_view text, Language lang);

/// Word tokens with their byte spans. Han characters are one token each.
/// Runs of other letters/digits form one token. Everything else separates.
/// EN tokens are lowercased; CN tokens keep their case.
std::vector<Token> tokenize_with_spans(std::string_view text, Language lang);
std::vector<std::string> tokenize(std::string_view text, Language lang);

/// Number of tokens; the word count used by the information-rate metric.
std::size_t count_words(std::string_view text, Language lang);

/// Finds `needle` inside `haystack` after normalizing the needle and treating
/// every whitespace run in the haystack as a single space. Returns the raw
/// byte span in the haystack. The haystack is expected to be NFC already.
std::optional<TextSpan> locate_normalized(std::string_view haystack,
                                          std::string_view needle);

/// Smallest span that starts at a sentence start and ends at a sentence end
/// of `text` and contains `span`.
TextSpan snap_to_sentences(std::string_view text, Language lang, TextSpan span);

}  // namespace ragscope
