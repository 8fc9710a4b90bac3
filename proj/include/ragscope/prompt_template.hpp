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

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ragscope {

/// Text with `{name}` placeholders. A placeholder is a brace pair enclosing
/// an identifier (letters, digits and `_ . / [ ] -`, not starting with a
/// digit); any other brace is literal text, so JSON examples inside a prompt
/// survive rendering untouched.
class PromptTemplate {
 public:
  using Resolver = std::function<std::optional<std::string>(std::string_view)>;

  PromptTemplate() = default;
  explicit PromptTemplate(std::string text, std::string name = "<inline>");

  /// Reads a UTF-8 template file. Throws ConfigError if it cannot be read.
  static PromptTemplate load(const std::filesystem::path& path);

  const std::string& text() const { return text_; }
  const std::string& name() const { return name_; }
  std::vector<std::string> placeholders() const;

  /// Throws ConfigError naming the first placeholder the resolver rejects.
  std::string render(const Resolver& resolve) const;
  std::string render(const std::map<std::string, std::string, std::less<>>& values) const;

 private:
  std::string text_;
  std::string name_;
};

}  // namespace ragscope
