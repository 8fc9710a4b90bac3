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

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace ragscope {

enum class Language { EN, CN };

std::string_view to_string(Language lang);
/// Accepts "EN"/"CN" (case-insensitive). Throws PreconditionError otherwise.
Language parse_language(std::string_view text);

enum class QuestionType {
  Factual,
  Summarization,
  MultiHopReasoning,
  InformationIntegration,
  NumericalComparison,
  TemporalSequence,
  Unanswerable,
};

inline constexpr std::array<QuestionType, 7> kAllQuestionTypes = {
    QuestionType::Factual,
    QuestionType::Summarization,
    QuestionType::MultiHopReasoning,
    QuestionType::InformationIntegration,
    QuestionType::NumericalComparison,
    QuestionType::TemporalSequence,
    QuestionType::Unanswerable,
};

/// Short code: FQ, SQ, MRQ, IIQ, NCQ, TSQ, UQ.
std::string_view short_code(QuestionType type);
std::string_view display_name(QuestionType type);
/// One-paragraph definition used when rendering generation prompts.
std::string_view definition(QuestionType type);
std::optional<QuestionType> question_type_from_code(std::string_view code);
/// Like question_type_from_code but throws PreconditionError on unknown codes.
QuestionType parse_question_type(std::string_view code);
/// Information Integration, Numerical Comparison and Temporal Sequence
/// questions draw on two documents.
bool is_multi_document(QuestionType type);

struct Document {
  std::string id;
  Language language = Language::EN;
  std::string scenario;
  /// Ordered key/value pairs such as {"company", "Acme Corp"}.
  std::vector<std::pair<std::string, std::string>> meta;
  std::string text;

  bool operator==(const Document&) const = default;
};

struct GroundTruthReference {
  std::string source_document_id;
  /// Verbatim excerpt of the source document.
  std::string text;

  bool operator==(const GroundTruthReference&) const = default;
};

struct QraRecord {
  std::string id;
  std::string question;
  QuestionType question_type = QuestionType::Factual;
  Language language = Language::EN;
  std::vector<std::string> document_ids;
  std::vector<GroundTruthReference> references;
  std::string answer;
  std::vector<std::string> keypoints;

  bool operator==(const QraRecord&) const = default;
};

/// Documents plus the QRA records that reference them. Immutable once
/// loaded; lookups are by caller-supplied id.
class EvalDataset {
 public:
  EvalDataset() = default;
  /// Builds the id index. Does not validate; see load_dataset.
  EvalDataset(std::vector<Document> documents, std::vector<QraRecord> records);

  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<QraRecord>& records() const { return records_; }
  std::size_t n_records() const { return records_.size(); }
  const Document* find_document(std::string_view id) const;

  bool operator==(const EvalDataset& other) const {
    return documents_ == other.documents_ && records_ == other.records_;
  }

 private:
  std::vector<Document> documents_;
  std::vector<QraRecord> records_;
  std::unordered_map<std::string, std::size_t> doc_index_;
};

/// Parses the JSONL dataset format. Every line is an object with a "kind"
/// of "document" or "record". Throws DatasetError carrying the 1-based line.
EvalDataset parse_dataset(std::istream& in);
EvalDataset load_dataset(const std::filesystem::path& path);

/// Writes documents first, then records, one compact object per line.
void write_dataset(const EvalDataset& dataset, std::ostream& out);
void save_dataset(const EvalDataset& dataset, const std::filesystem::path& path);

nlohmann::ordered_json to_json(const Document& doc);
nlohmann::ordered_json to_json(const QraRecord& record);

enum class Severity { Warning, Error };

struct Violation {
  Severity severity;
  std::string field;
  std::string message;
};

/// Checks one record against the dataset it belongs to. Never throws.
std::vector<Violation> validate_record(const QraRecord& record,
                                       const EvalDataset& dataset);

// Schema and configuration trees keep key order, which drives both leaf
// traversal order and the rendering fed to document prompts.
using Tree = nlohmann::ordered_json;

/// Abstract key-element structure of a scenario. Leaves are empty strings;
/// list-valued nodes hold entry templates that share one field set.
struct Schema {
  std::string scenario;
  Tree body;
};

enum class Provenance { Rule, Llm };

std::string_view to_string(Provenance p);

/// A schema instance: same shape, every leaf filled. `provenance` is keyed
/// by leaf path (see genpipeline.hpp for the path syntax).
struct Config {
  std::string schema_id;
  Tree body;
  std::map<std::string, Provenance> provenance;
};

}  // namespace ragscope
