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

#include "ragscope/templates.hpp"

#include <utility>

#include "ragscope/error.hpp"

namespace ragscope {
namespace detail {
extern const std::pair<std::string_view, std::string_view> kEmbeddedTemplates[];
extern const std::size_t kEmbeddedTemplateCount;
}  // namespace detail

std::optional<std::string_view> embedded_template(std::string_view relative_path) {
  for (std::size_t i = 0; i < detail::kEmbeddedTemplateCount; ++i) {
    if (detail::kEmbeddedTemplates[i].first == relative_path) {
      return detail::kEmbeddedTemplates[i].second;
    }
  }
  return std::nullopt;
}

std::vector<std::string_view> embedded_template_names() {
  std::vector<std::string_view> out;
  for (std::size_t i = 0; i < detail::kEmbeddedTemplateCount; ++i) {
    out.push_back(detail::kEmbeddedTemplates[i].first);
  }
  return out;
}

PromptTemplate load_template(const std::optional<std::filesystem::path>& dir,
                             std::string_view relative_path) {
  if (dir) return PromptTemplate::load(*dir / std::filesystem::path(std::string(relative_path)));
  if (auto text = embedded_template(relative_path)) {
    return PromptTemplate(std::string(*text), std::string(relative_path));
  }
  throw ConfigError("no template named " + std::string(relative_path));
}

std::string qra_template_path(std::string_view type_code) {
  return "generation/qra_" + std::string(type_code) + ".txt";
}

}  // namespace ragscope
