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

#include "ragscope/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "ragscope/error.hpp"
#include "ragscope/textproc.hpp"

namespace ragscope {
namespace {

// Ordered, so document meta keeps its file order.
using json = nlohmann::ordered_json;

struct QuestionTypeInfo {
  QuestionType type;
  std::string_view code;
  std::string_view name;
  std::string_view definition;
};

constexpr std::array<QuestionTypeInfo, 7> kQuestionTypes = {{
    {QuestionType::Factual, "FQ", "Factual",
     "A question targeting one specific detail within a single document, such "
     "as a figure, a date, a verdict or a symptom."},
    {QuestionType::Summarization, "SQ", "Summarization",
     "A question whose answer must cover all relevant information on one topic "
     "of a single document."},
    {QuestionType::MultiHopReasoning, "MRQ", "Multi-hop Reasoning",
     "A question that chains several related events or details of a single "
     "document into a reasoning step."},
    {QuestionType::InformationIntegration, "IIQ", "Information Integration",
     "A question that combines distinct information fragments from two "
     "documents."},
    {QuestionType::NumericalComparison, "NCQ", "Numerical Comparison",
     "A question that locates figures in two documents and compares them to "
     "reach a conclusion."},
    {QuestionType::TemporalSequence, "TSQ", "Temporal Sequence",
     "A question that asks for the chronological order of events described in "
     "two documents."},
    {QuestionType::Unanswerable, "UQ", "Unanswerable",
     "A question about information the document does not contain, or contains "
     "too little of to answer."},
}};

const QuestionTypeInfo& info(QuestionType type) {
  return kQuestionTypes[static_cast<std::size_t>(type)];
}

std::string upper_ascii(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

[[noreturn]] void fail(const std::string& what, std::size_t line) {
  throw DatasetError(what + " at line " + std::to_string(line), line);
}

std::string get_string(const json& obj, const char* field, std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end()) fail(std::string("missing field '") + field + "'", line);
  if (!it->is_string()) fail(std::string("field '") + field + "' must be a string", line);
  return it->get<std::string>();
}

std::vector<std::string> get_string_list(const json& obj, const char* field,
                                         std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end()) return {};
  if (!it->is_array()) fail(std::string("field '") + field + "' must be an array", line);
  std::vector<std::string> out;
  for (const auto& item : *it) {
    if (!item.is_string()) fail(std::string("field '") + field + "' must hold strings", line);
    out.push_back(item.get<std::string>());
  }
  return out;
}

Language get_language(const json& obj, std::size_t line) {
  try {
    return parse_language(get_string(obj, "language", line));
  } catch (const PreconditionError&) {
    fail("unknown language", line);
  }
}

Document parse_document(const json& obj, std::size_t line) {
  Document doc;
  doc.id = get_string(obj, "id", line);
  doc.language = get_language(obj, line);
  if (obj.contains("scenario")) doc.scenario = get_string(obj, "scenario", line);
  if (const auto it = obj.find("meta"); it != obj.end()) {
    if (!it->is_object()) fail("field 'meta' must be an object", line);
    for (const auto& [key, value] : it->items()) {
      if (!value.is_string()) fail("meta values must be strings", line);
      doc.meta.emplace_back(key, value.get<std::string>());
    }
  }
  doc.text = get_string(obj, "text", line);
  if (doc.text.empty()) fail("empty document text", line);
  return doc;
}

QraRecord parse_record(const json& obj, std::size_t line) {
  QraRecord record;
  record.id = get_string(obj, "id", line);
  record.question = get_string(obj, "question", line);
  const auto code = get_string(obj, "question_type", line);
  const auto type = question_type_from_code(code);
  if (!type) fail("unknown question type", line);
  record.question_type = *type;
  if (obj.contains("language")) record.language = get_language(obj, line);
  record.document_ids = get_string_list(obj, "document_ids", line);
  if (const auto it = obj.find("references"); it != obj.end()) {
    if (!it->is_array()) fail("field 'references' must be an array", line);
    for (const auto& ref : *it) {
      if (!ref.is_object()) fail("references must be objects", line);
      record.references.push_back(
          {get_string(ref, "source_document_id", line), get_string(ref, "text", line)});
    }
  }
  record.answer = get_string(obj, "answer", line);
  record.keypoints = get_string_list(obj, "keypoints", line);
  return record;
}

}  // namespace

std::string_view to_string(Language lang) { return lang == Language::EN ? "EN" : "CN"; }

Language parse_language(std::string_view text) {
  const auto upper = upper_ascii(text);
  if (upper == "EN") return Language::EN;
  if (upper == "CN" || upper == "ZH") return Language::CN;
  throw PreconditionError("unknown language '" + std::string(text) + "'");
}

std::string_view short_code(QuestionType type) { return info(type).code; }
std::string_view display_name(QuestionType type) { return info(type).name; }
std::string_view definition(QuestionType type) { return info(type).definition; }

std::optional<QuestionType> question_type_from_code(std::string_view code) {
  for (const auto& entry : kQuestionTypes) {
    if (entry.code == code) return entry.type;
  }
  return std::nullopt;
}

QuestionType parse_question_type(std::string_view code) {
  if (auto type = question_type_from_code(code)) return *type;
  throw PreconditionError("unknown question type code '" + std::string(code) + "'");
}

bool is_multi_document(QuestionType type) {
  return type == QuestionType::InformationIntegration ||
         type == QuestionType::NumericalComparison ||
         type == QuestionType::TemporalSequence;
}

std::string_view to_string(Provenance p) { return p == Provenance::Rule ? "RULE" : "LLM"; }

EvalDataset::EvalDataset(std::vector<Document> documents, std::vector<QraRecord> records)
    : documents_(std::move(documents)), records_(std::move(records)) {
  for (std::size_t i = 0; i < documents_.size(); ++i) doc_index_.emplace(documents_[i].id, i);
}

const Document* EvalDataset::find_document(std::string_view id) const {
  const auto it = doc_index_.find(std::string(id));
  return it == doc_index_.end() ? nullptr : &documents_[it->second];
}

EvalDataset parse_dataset(std::istream& in) {
  std::vector<Document> documents;
  std::vector<QraRecord> records;
  std::vector<std::size_t> record_lines;
  std::vector<bool> missing_language;
  std::unordered_set<std::string> doc_ids;
  std::unordered_set<std::string> record_ids;

  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      fail(std::string("malformed JSON (") + e.what() + ")", line);
    }
    if (!obj.is_object()) fail("expected a JSON object", line);
    const auto kind = get_string(obj, "kind", line);
    if (kind == "document") {
      auto doc = parse_document(obj, line);
      if (!doc_ids.insert(doc.id).second) fail("duplicate document id " + doc.id, line);
      documents.push_back(std::move(doc));
    } else if (kind == "record") {
      auto record = parse_record(obj, line);
      missing_language.push_back(!obj.contains("language"));
      if (!record_ids.insert(record.id).second) fail("duplicate record id " + record.id, line);
      records.push_back(std::move(record));
      record_lines.push_back(line);
    } else {
      fail("unknown kind '" + kind + "'", line);
    }
  }

  // Cross references resolve against the whole file, so a record may
  // precede the documents it cites.
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& record = records[i];
    for (const auto& id : record.document_ids) {
      if (!doc_ids.contains(id)) fail("dangling document_id " + id, record_lines[i]);
    }
    for (const auto& ref : record.references) {
      if (!doc_ids.contains(ref.source_document_id)) {
        fail("dangling document_id " + ref.source_document_id, record_lines[i]);
      }
    }
  }
  // Records without an explicit language inherit it from their first document.
  std::unordered_map<std::string, Language> doc_language;
  for (const auto& doc : documents) doc_language.emplace(doc.id, doc.language);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!missing_language[i] || records[i].document_ids.empty()) continue;
    records[i].language = doc_language.at(records[i].document_ids.front());
  }
  return EvalDataset(std::move(documents), std::move(records));
}

EvalDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset " + path.string());
  return parse_dataset(in);
}

nlohmann::ordered_json to_json(const Document& doc) {
  nlohmann::ordered_json obj;
  obj["kind"] = "document";
  obj["id"] = doc.id;
  obj["language"] = to_string(doc.language);
  obj["scenario"] = doc.scenario;
  obj["meta"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : doc.meta) obj["meta"][key] = value;
  obj["text"] = doc.text;
  return obj;
}

nlohmann::ordered_json to_json(const QraRecord& record) {
  nlohmann::ordered_json obj;
  obj["kind"] = "record";
  obj["id"] = record.id;
  obj["language"] = to_string(record.language);
  obj["question"] = record.question;
  obj["question_type"] = short_code(record.question_type);
  obj["document_ids"] = record.document_ids;
  obj["references"] = nlohmann::ordered_json::array();
  for (const auto& ref : record.references) {
    obj["references"].push_back(
        {{"source_document_id", ref.source_document_id}, {"text", ref.text}});
  }
  obj["answer"] = record.answer;
  obj["keypoints"] = record.keypoints;
  return obj;
}

void write_dataset(const EvalDataset& dataset, std::ostream& out) {
  for (const auto& doc : dataset.documents()) out << to_json(doc).dump() << '\n';
  for (const auto& record : dataset.records()) out << to_json(record).dump() << '\n';
}

void save_dataset(const EvalDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot write dataset " + path.string());
  write_dataset(dataset, out);
  if (!out) throw DatasetError("write failed for " + path.string());
}

std::vector<Violation> validate_record(const QraRecord& record, const EvalDataset& dataset) {
  std::vector<Violation> out;
  auto error = [&](std::string field, std::string message) {
    out.push_back({Severity::Error, std::move(field), std::move(message)});
  };
  const bool unanswerable = record.question_type == QuestionType::Unanswerable;

  if (record.question.empty()) error("question", "question is empty");
  if (record.answer.empty()) error("answer", "answer is empty");
  if (record.document_ids.empty()) error("document_ids", "no source documents");
  for (const auto& id : record.document_ids) {
    if (dataset.find_document(id) == nullptr) error("document_ids", "dangling document_id " + id);
  }

  if (record.references.empty() && !unanswerable) {
    error("references", "references are empty for a non-Unanswerable record");
  }
  std::set<std::string> seen_sentences;
  for (std::size_t i = 0; i < record.references.size(); ++i) {
    const auto& ref = record.references[i];
    const std::string field = "references[" + std::to_string(i) + "]";
    if (ref.text.empty()) {
      error(field, "reference text is empty");
      continue;
    }
    if (std::find(record.document_ids.begin(), record.document_ids.end(),
                  ref.source_document_id) == record.document_ids.end()) {
      error(field, "source " + ref.source_document_id + " is not among the record's documents");
    }
    const Document* source = dataset.find_document(ref.source_document_id);
    if (source == nullptr) {
      error(field, "dangling document_id " + ref.source_document_id);
      continue;
    }
    if (!locate_normalized(nfc(source->text), ref.text)) {
      error(field, "reference text not found in " + ref.source_document_id);
    }
    for (const auto& sentence : split_sentences(ref.text, record.language)) {
      if (!seen_sentences.insert(sentence.text).second) {
        out.push_back({Severity::Warning, field,
                       "sentence repeated across references: \"" + sentence.text + "\""});
      }
    }
  }

  if (record.keypoints.empty()) {
    if (!unanswerable) error("keypoints", "no keypoints for a non-Unanswerable record");
  } else if (record.keypoints.size() < 3 || record.keypoints.size() > 5) {
    out.push_back({Severity::Warning, "keypoints",
                   "keypoints=" + std::to_string(record.keypoints.size()) + " outside 3-5"});
  }
  for (std::size_t i = 0; i < record.keypoints.size(); ++i) {
    if (normalize(record.keypoints[i]).empty()) {
      error("keypoints[" + std::to_string(i) + "]", "keypoint is empty");
    }
  }
  return out;
}

}  // namespace ragscope
