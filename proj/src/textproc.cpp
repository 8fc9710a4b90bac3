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

#include "ragscope/textproc.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include "ragscope/error.hpp"

namespace ragscope {
namespace {

struct CodePoint {
  UChar32 value;
  std::size_t begin;
  std::size_t end;
};

std::vector<CodePoint> decode(std::string_view text) {
  std::vector<CodePoint> out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
  const auto length = static_cast<std::int32_t>(text.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) c = 0xFFFD;
    out.push_back({c, static_cast<std::size_t>(start), static_cast<std::size_t>(i)});
  }
  return out;
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c); }

bool is_line_break(UChar32 c) {
  return c == '\n' || c == '\r' || c == 0x0085 || c == 0x2028 || c == 0x2029;
}

bool is_han(UChar32 c) {
  if (c < 0x2E80) return false;
  UErrorCode status = U_ZERO_ERROR;
  return uscript_getScript(c, &status) == USCRIPT_HAN && U_SUCCESS(status);
}

bool is_word_char(UChar32 c) {
  if (c < 0x80) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  }
  if (u_isalnum(c)) return true;
  const auto type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK ||
         type == U_ENCLOSING_MARK;
}

bool is_en_terminator(UChar32 c) { return c == '.' || c == '!' || c == '?'; }

bool is_cn_terminator(UChar32 c) {
  return c == 0x3002 /* 。 */ || c == 0xFF01 /* ！ */ || c == 0xFF1F /* ？ */ ||
         c == 0xFF1B /* ； */;
}

bool is_closer(UChar32 c) {
  switch (c) {
    case '"': case '\'': case ')': case ']': case '}':
    case 0x2019: case 0x201D:                             // ’ ”
    case 0x300D: case 0x300F: case 0x3011: case 0x300B:   // 」 』 】 》
    case 0x3009: case 0xFF09: case 0xFF3D:                // 〉 ） ］
      return true;
    default:
      return false;
  }
}

// Lowercased words that end in a period without ending the sentence.
constexpr std::array<std::string_view, 22> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "e.g",
    "i.e", "inc", "ltd", "co", "corp", "no", "fig", "approx", "dept", "u.s",
    "u.k",
};

bool closes_abbreviation(const std::vector<CodePoint>& cps, std::size_t period,
                         std::string_view text) {
  std::size_t first = period;
  while (first > 0) {
    const UChar32 c = cps[first - 1].value;
    if (c >= 0x80 || !(is_word_char(c) || c == '.')) break;
    --first;
  }
  if (first == period) return false;
  std::string word(text.substr(cps[first].begin, cps[period].begin - cps[first].begin));
  // A single capital is an initial, as in "M. Gray".
  if (word.size() == 1 && word[0] >= 'A' && word[0] <= 'Z') return true;
  for (auto& ch : word) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) !=
         kAbbreviations.end();
}

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* instance = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || instance == nullptr) {
    throw Error("ICU NFC normalizer unavailable");
  }
  return *instance;
}

bool is_ascii(std::string_view text) {
  return std::all_of(text.begin(), text.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (const auto& cp : decode(text)) {
    if (is_space(cp.value)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.append(text.substr(cp.begin, cp.end - cp.begin));
  }
  return out;
}

}  // namespace

std::string nfc(std::string_view text) {
  if (is_ascii(text)) return std::string(text);
  const auto& normalizer = nfc_instance();
  UErrorCode status = U_ZERO_ERROR;
  std::string out;
  icu::StringByteSink<std::string> sink(&out, static_cast<int32_t>(text.size()));
  normalizer.normalizeUTF8(0, icu::StringPiece(text.data(), static_cast<int32_t>(text.size())),
                           sink, nullptr, status);
  if (U_FAILURE(status)) return std::string(text);
  return out;
}

std::string normalize(std::string_view text) { return collapse_whitespace(nfc(text)); }

std::string fold_case(std::string_view text) {
  if (is_ascii(text)) {
    std::string out(text);
    for (auto& ch : out) {
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
    }
    return out;
  }
  auto unicode = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  unicode.toLower(icu::Locale::getRoot());
  std::string out;
  unicode.toUTF8String(out);
  return out;
}

std::vector<Sentence> split_sentences(std::string_view text, Language lang) {
  const auto cps = decode(text);
  std::vector<Sentence> out;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::size_t start = kNone;
  std::size_t last_end = 0;

  auto close = [&](std::size_t end) {
    if (start == kNone) return;
    auto normalized = normalize(text.substr(start, end - start));
    if (!normalized.empty()) out.push_back({std::move(normalized), {start, end}});
    start = kNone;
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    const UChar32 c = cps[i].value;
    if (is_line_break(c)) {
      close(last_end);
      ++i;
      continue;
    }
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (start == kNone) start = cps[i].begin;
    last_end = cps[i].end;

    const bool en = lang == Language::EN;
    if (en ? is_en_terminator(c) : is_cn_terminator(c)) {
      std::size_t j = i + 1;
      while (j < cps.size() && (en ? is_en_terminator(cps[j].value) : is_cn_terminator(cps[j].value))) ++j;
      while (j < cps.size() && is_closer(cps[j].value)) ++j;
      bool boundary = true;
      if (en) {
        boundary = j == cps.size() || is_space(cps[j].value);
        if (boundary && c == '.' && j == i + 1 && closes_abbreviation(cps, i, text)) {
          boundary = false;
        }
      }
      if (boundary) {
        last_end = cps[j - 1].end;
        close(last_end);
        i = j;
        continue;
      }
    }
    ++i;
  }
  close(last_end);
  return out;
}

std::vector<Token> tokenize_with_spans(std::string_view text, Language lang) {
  const auto cps = decode(text);
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    const UChar32 c = cps[i].value;
    if (is_han(c)) {
      out.push_back({std::string(text.substr(cps[i].begin, cps[i].end - cps[i].begin)),
                     {cps[i].begin, cps[i].end}});
      ++i;
      continue;
    }
    if (!is_word_char(c)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < cps.size() && is_word_char(cps[j].value) && !is_han(cps[j].value)) ++j;
    const TextSpan span{cps[i].begin, cps[j - 1].end};
    std::string word(text.substr(span.begin, span.size()));
    if (lang == Language::EN) word = fold_case(word);
    out.push_back({std::move(word), span});
    i = j;
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text, Language lang) {
  auto tokens = tokenize_with_spans(text, lang);
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (auto& token : tokens) out.push_back(std::move(token.text));
  return out;
}

std::size_t count_words(std::string_view text, Language lang) {
  return tokenize_with_spans(text, lang).size();
}

std::optional<TextSpan> locate_normalized(std::string_view haystack,
                                          std::string_view needle) {
  const std::string target = normalize(needle);
  if (target.empty()) return std::nullopt;

  // Collapsed copy of the haystack plus, per collapsed byte, the raw span of
  // the code point (or whitespace run) it came from.
  std::string collapsed;
  std::vector<TextSpan> origin;
  collapsed.reserve(haystack.size());
  origin.reserve(haystack.size());
  const auto cps = decode(haystack);
  for (std::size_t i = 0; i < cps.size();) {
    if (is_space(cps[i].value)) {
      std::size_t j = i;
      while (j < cps.size() && is_space(cps[j].value)) ++j;
      collapsed.push_back(' ');
      origin.push_back({cps[i].begin, cps[j - 1].end});
      i = j;
      continue;
    }
    for (std::size_t b = cps[i].begin; b < cps[i].end; ++b) {
      collapsed.push_back(haystack[b]);
      origin.push_back({cps[i].begin, cps[i].end});
    }
    ++i;
  }
  const auto pos = collapsed.find(target);
  if (pos == std::string::npos) return std::nullopt;
  return TextSpan{origin[pos].begin, origin[pos + target.size() - 1].end};
}

TextSpan snap_to_sentences(std::string_view text, Language lang, TextSpan span) {
  TextSpan out = span;
  for (const auto& sentence : split_sentences(text, lang)) {
    const bool overlaps = sentence.span.begin < span.end && span.begin < sentence.span.end;
    if (!overlaps) continue;
    out.begin = std::min(out.begin, sentence.span.begin);
    out.end = std::max(out.end, sentence.span.end);
  }
  return out;
}

}  // namespace ragscope
