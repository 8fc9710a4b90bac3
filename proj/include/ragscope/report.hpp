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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragscope/generation_metrics.hpp"

namespace ragscope {

enum class GroupDimension { QuestionType, Scenario, Language };

std::string_view to_string(GroupDimension dim);
GroupDimension parse_group_dimension(std::string_view text);

/// Group label of the per-dimension average row.
inline constexpr std::string_view kAverageGroup = "Avg.";

/// Means over a group's evaluated records. A metric is absent when no
/// record of the group defines it (recall for unanswerable questions).
struct MetricRow {
  std::string group;
  std::optional<double> recall;
  std::optional<double> eir;
  std::optional<double> completeness;
  std::optional<double> hallucination;
  std::optional<double> irrelevancy;
  std::optional<double> rouge_l;
  std::optional<double> bleu;
  std::size_t n = 0;
  std::size_t failures = 0;
};

struct DimensionTable {
  GroupDimension dimension = GroupDimension::QuestionType;
  /// Group rows in a fixed order, then the "Avg." row.
  std::vector<MetricRow> rows;
};

struct MetricReport {
  /// Sweep setting such as "256-10"; empty for a single run.
  std::string setting;
  std::vector<DimensionTable> tables;
};

enum class ReportFormat { Csv, Markdown, Json };

std::string_view to_string(ReportFormat format);
ReportFormat parse_report_format(std::string_view text);

/// Percentage with two decimals, "-" for an absent value.
std::string format_percent(std::optional<double> fraction);

/// Columns: [setting,] dimension, group, recall, eir, completeness,
/// hallucination, irrelevancy, rouge_l, bleu, n, failures. The setting
/// column appears when any report carries one. Throws PreconditionError
/// on an empty report list.
void emit_report(std::span<const MetricReport> reports, ReportFormat format, std::ostream& out);
std::string render_report(std::span<const MetricReport> reports, ReportFormat format);
/// Throws Error when the file cannot be written.
void write_report(std::span<const MetricReport> reports, ReportFormat format,
                  const std::filesystem::path& path);

/// Reads the JSON format back. Values keep their two-decimal rounding.
std::vector<MetricReport> parse_report_json(const nlohmann::json& json);

}  // namespace ragscope
