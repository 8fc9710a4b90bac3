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

#include "ragscope/report.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ragscope/corpus.hpp"
#include "ragscope/error.hpp"

namespace ragscope {
namespace {

using nlohmann::ordered_json;

constexpr const char* kMetricNames[] = {"recall",        "eir",         "completeness",
                                        "hallucination", "irrelevancy", "rouge_l",
                                        "bleu"};
constexpr const char* kMetricTitles[] = {"Recall",        "EIR",         "Completeness",
                                         "Hallucination", "Irrelevancy", "Rouge-L",
                                         "BLEU"};

std::array<std::optional<double>, 7> metrics_of(const MetricRow& row) {
  return {row.recall,        row.eir,     row.completeness, row.hallucination,
          row.irrelevancy,   row.rouge_l, row.bleu};
}

std::optional<double>* metric_slot(MetricRow& row, std::size_t i) {
  std::optional<double>* slots[] = {&row.recall,        &row.eir,     &row.completeness,
                                    &row.hallucination, &row.irrelevancy, &row.rouge_l,
                                    &row.bleu};
  return slots[i];
}

std::string dimension_title(GroupDimension dim) {
  switch (dim) {
    case GroupDimension::QuestionType: return "Question Type";
    case GroupDimension::Scenario: return "Scenario";
    case GroupDimension::Language: return "Language";
  }
  return "?";
}

std::string display_group(GroupDimension dim, const std::string& group) {
  if (dim == GroupDimension::QuestionType) {
    if (auto t = question_type_from_code(group)) return std::string(display_name(*t));
  }
  return group;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

bool any_setting(std::span<const MetricReport> reports) {
  for (const auto& r : reports) {
    if (!r.setting.empty()) return true;
  }
  return false;
}

void emit_csv(std::span<const MetricReport> reports, std::ostream& out) {
  const bool with_setting = any_setting(reports);
  if (with_setting) out << "setting,";
  out << "dimension,group";
  for (auto name : kMetricNames) out << ',' << name;
  out << ",n,failures\n";
  for (const auto& report : reports) {
    for (const auto& table : report.tables) {
      for (const auto& row : table.rows) {
        if (with_setting) out << csv_field(report.setting) << ',';
        out << to_string(table.dimension) << ',' << csv_field(row.group);
        for (const auto& v : metrics_of(row)) out << ',' << format_percent(v);
        out << ',' << row.n << ',' << row.failures << '\n';
      }
    }
  }
}

void emit_markdown(std::span<const MetricReport> reports, std::ostream& out) {
  bool first = true;
  for (const auto& report : reports) {
    for (const auto& table : report.tables) {
      if (!first) out << '\n';
      first = false;
      out << "## " << dimension_title(table.dimension);
      if (!report.setting.empty()) out << " (" << report.setting << ")";
      out << "\n\n| " << dimension_title(table.dimension);
      for (auto title : kMetricTitles) out << " | " << title;
      out << " | n | failures |\n|---";
      for (std::size_t i = 0; i < std::size(kMetricTitles) + 2; ++i) out << "|---:";
      out << "|\n";
      for (const auto& row : table.rows) {
        out << "| " << display_group(table.dimension, row.group);
        for (const auto& v : metrics_of(row)) out << " | " << format_percent(v);
        out << " | " << row.n << " | " << row.failures << " |\n";
      }
    }
  }
}

ordered_json percent_json(std::optional<double> v) {
  if (!v) return nullptr;
  // Two-decimal rounding through the same formatter as the text outputs.
  return std::stod(format_percent(v));
}

void emit_json(std::span<const MetricReport> reports, std::ostream& out) {
  ordered_json doc;
  doc["reports"] = ordered_json::array();
  for (const auto& report : reports) {
    ordered_json r;
    if (!report.setting.empty()) r["setting"] = report.setting;
    r["tables"] = ordered_json::array();
    for (const auto& table : report.tables) {
      ordered_json t;
      t["dimension"] = to_string(table.dimension);
      t["rows"] = ordered_json::array();
      for (const auto& row : table.rows) {
        ordered_json j;
        j["group"] = row.group;
        const auto values = metrics_of(row);
        for (std::size_t i = 0; i < values.size(); ++i) j[kMetricNames[i]] = percent_json(values[i]);
        j["n"] = row.n;
        j["failures"] = row.failures;
        t["rows"].push_back(std::move(j));
      }
      r["tables"].push_back(std::move(t));
    }
    doc["reports"].push_back(std::move(r));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace

std::string_view to_string(GroupDimension dim) {
  switch (dim) {
    case GroupDimension::QuestionType: return "question_type";
    case GroupDimension::Scenario: return "scenario";
    case GroupDimension::Language: return "language";
  }
  return "?";
}

GroupDimension parse_group_dimension(std::string_view text) {
  if (text == "question_type" || text == "type") return GroupDimension::QuestionType;
  if (text == "scenario") return GroupDimension::Scenario;
  if (text == "language") return GroupDimension::Language;
  throw PreconditionError("unknown grouping dimension " + std::string(text));
}

std::string_view to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Markdown: return "markdown";
    case ReportFormat::Json: return "json";
  }
  return "?";
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "markdown" || text == "md") return ReportFormat::Markdown;
  if (text == "json") return ReportFormat::Json;
  throw PreconditionError("unknown report format " + std::string(text));
}

std::string format_percent(std::optional<double> fraction) {
  if (!fraction) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *fraction * 100.0);
  return buf;
}

void emit_report(std::span<const MetricReport> reports, ReportFormat format, std::ostream& out) {
  if (reports.empty()) throw PreconditionError("empty report");
  bool has_rows = false;
  for (const auto& r : reports) {
    for (const auto& t : r.tables) has_rows = has_rows || !t.rows.empty();
  }
  if (!has_rows) throw PreconditionError("empty report");
  switch (format) {
    case ReportFormat::Csv: emit_csv(reports, out); break;
    case ReportFormat::Markdown: emit_markdown(reports, out); break;
    case ReportFormat::Json: emit_json(reports, out); break;
  }
}

std::string render_report(std::span<const MetricReport> reports, ReportFormat format) {
  std::ostringstream out;
  emit_report(reports, format, out);
  return out.str();
}

void write_report(std::span<const MetricReport> reports, ReportFormat format,
                  const std::filesystem::path& path) {
  const auto text = render_report(reports, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write report " + path.string());
  out << text;
  if (!out.flush()) throw Error("cannot write report " + path.string());
}

std::vector<MetricReport> parse_report_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("reports") || !doc["reports"].is_array()) {
    throw Error("report JSON needs a \"reports\" array");
  }
  std::vector<MetricReport> out;
  for (const auto& r : doc["reports"]) {
    MetricReport report;
    report.setting = r.value("setting", "");
    for (const auto& t : r.at("tables")) {
      DimensionTable table;
      table.dimension = parse_group_dimension(t.at("dimension").get<std::string>());
      for (const auto& j : t.at("rows")) {
        MetricRow row;
        row.group = j.at("group").get<std::string>();
        for (std::size_t i = 0; i < std::size(kMetricNames); ++i) {
          const auto& v = j.at(kMetricNames[i]);
          if (!v.is_null()) *metric_slot(row, i) = v.get<double>() / 100.0;
        }
        row.n = j.at("n").get<std::size_t>();
        row.failures = j.at("failures").get<std::size_t>();
        table.rows.push_back(std::move(row));
      }
      report.tables.push_back(std::move(table));
    }
    out.push_back(std::move(report));
  }
  return out;
}

}  // namespace ragscope
