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
#include <optional>
#include <string_view>
#include <vector>

#include "ragscope/prompt_template.hpp"

namespace ragscope {

// Paths relative to the templates/ directory.
inline constexpr std::string_view kJudgeTemplate = "judge/keypoint_evaluation.txt";
inline constexpr std::string_view kKeypointTemplate = "generation/keypoints.txt";
inline constexpr std::string_view kReferenceTemplate = "generation/extract_references.txt";
inline constexpr std::string_view kRefineTemplate = "generation/refine_answer.txt";
inline constexpr std::string_view kConfigLeafTemplate = "generation/config_leaf.txt";
inline constexpr std::string_view kAnswerTemplate = "eval/generation.txt";

/// Copy of templates/ compiled into the library.
std::optional<std::string_view> embedded_template(std::string_view relative_path);
std::vector<std::string_view> embedded_template_names();

/// Reads `relative_path` under `dir` when a directory is given, otherwise
/// returns the compiled-in copy. Throws ConfigError when neither exists.
PromptTemplate load_template(const std::optional<std::filesystem::path>& dir,
                             std::string_view relative_path);

/// "generation/qra_FQ.txt" and so on.
std::string qra_template_path(std::string_view type_code);

}  // namespace ragscope
