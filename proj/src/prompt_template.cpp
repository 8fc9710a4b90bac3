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

#include "ragscope/prompt_template.hpp"

#include <fstream>
#include <sstream>

#include "ragscope/error.hpp"

namespace ragscope {
namespace {

bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '.' || c == '/' || c == '[' || c == ']' || c == '-';
}

// Length of the placeholder starting at `open` (a '{'), or 0.
std::size_t placeholder_length(std::string_view text, std::size_t open) {
  std::size_t i = open + 1;
  if (i >= text.size() || (text[i] >= '0' && text[i] <= '9')) return 0;
  while (i < text.size() && is_ident_char(text[i])) ++i;
  if (i == open + 1 || i >= text.size() || text[i] != '}') return 0;
  return i - open + 1;
}

}  // namespace

PromptTemplate::PromptTemplate(std::string text, std::string name)
    : text_(std::move(text)), name_(std::move(name)) {}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read prompt template " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return PromptTemplate(buffer.str(), path.string());
}

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < text_.size(); ++i) {
    if (text_[i] != '{') continue;
    if (const auto len = placeholder_length(text_, i)) {
      out.push_back(text_.substr(i + 1, len - 2));
      i += len - 1;
    }
  }
  return out;
}

std::string PromptTemplate::render(const Resolver& resolve) const {
  std::string out;
  out.reserve(text_.size());
  for (std::size_t i = 0; i < text_.size(); ++i) {
    const auto len = text_[i] == '{' ? placeholder_length(text_, i) : 0;
    if (len == 0) {
      out.push_back(text_[i]);
      continue;
    }
    const std::string_view name(text_.data() + i + 1, len - 2);
    auto value = resolve(name);
    if (!value) {
      throw ConfigError("unresolved placeholder {" + std::string(name) + "} in template " +
                        name_);
    }
    out += *value;
    i += len - 1;
  }
  return out;
}

std::string PromptTemplate::render(
    const std::map<std::string, std::string, std::less<>>& values) const {
  return render([&](std::string_view name) -> std::optional<std::string> {
    const auto it = values.find(name);
    if (it == values.end()) return std::nullopt;
    return it->second;
  });
}

}  // namespace ragscope
