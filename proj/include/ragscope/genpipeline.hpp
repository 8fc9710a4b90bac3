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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ragscope/corpus.hpp"
#include "ragscope/llm_gateway.hpp"
#include "ragscope/prompt_template.hpp"

namespace ragscope {

// Leaf paths join object keys with '/' and write list positions as "[i]":
// "defendant/name", "caseProcess[2]/date". A rule may address every entry of
// a list at once with "[]": "caseProcess[]/date".

/// Rewrites event maps into event lists. An object whose keys all look like
/// concrete names (they contain a space or a non-ASCII character, or start
/// with an upper-case letter) and whose values are all objects becomes a
/// list of entries, each with an "event" field holding the former key
/// followed by that entry's fields. Entries are padded to the union of
/// fields. Applies recursively; idempotent. Throws ConfigError when a leaf
/// is neither a string nor a container.
Tree normalize_schema(const Tree& raw);
Schema normalize_schema(const Schema& raw);

/// Loads {"scenario": ..., "schema": {...}}.
Schema load_schema(const std::filesystem::path& path);

struct LeafRule {
  enum class Kind { Choice, IntRange, DateRange, Llm };

  Kind kind = Kind::Choice;
  std::vector<std::string> values;  // Choice
  std::int64_t min = 0;             // IntRange
  std::int64_t max = 0;
  std::string prefix;
  std::string suffix;
  std::string date_from;  // DateRange, ISO dates
  std::string date_to;
  /// DateRange output format: iso, long, ordinal, us or cn.
  std::string date_format = "iso";
  /// Llm: a prompt that replaces the default leaf template.
  std::optional<std::string> prompt;
};

/// Per-leaf generators, keyed by leaf path.
class RuleTable {
 public:
  RuleTable() = default;
  /// {"path": {"kind": "choice", "values": [...]}, ...}
  static RuleTable from_json(const nlohmann::json& json);
  static RuleTable load(const std::filesystem::path& path);

  void set(std::string path, LeafRule rule) { rules_[std::move(path)] = std::move(rule); }
  /// Exact path first, then the path with every index replaced by "[]".
  const LeafRule* find(std::string_view path) const;
  std::size_t size() const { return rules_.size(); }

 private:
  std::map<std::string, LeafRule, std::less<>> rules_;
};

/// "a[3]/b[0]/c" -> "a[]/b[]/c".
std::string wildcard_path(std::string_view path);

/// Every leaf path of `tree` in preorder.
std::vector<std::string> leaf_paths(const Tree& tree);

/// Model and sampling settings shared by the generation stages.
struct GenerationOptions {
  std::string model = "gpt-4o";
  double temperature = 0.7;
  double top_p = 1.0;
  int max_new_tokens = 1024;
  int document_max_new_tokens = 4096;
  /// Overrides the compiled-in templates.
  std::optional<std::filesystem::path> template_dir;
};

/// Fills every schema leaf. A leaf that already holds text is kept and
/// tagged Rule unless a rule addresses it. Rule leaves are drawn first, in preorder, from a generator
/// seeded with `seed`. LLM leaves are filled afterwards, in preorder, and
/// each prompt sees the configuration filled so far and the entry that
/// holds the leaf, so parent values drive the content of nested entries.
/// Throws ConfigError naming an uncovered leaf or an LLM leaf without a
/// gateway.
Config generate_config(const Schema& schema, const RuleTable& rules, std::uint64_t seed,
                       Gateway* llm, const GenerationOptions& options = {});

/// Pretty JSON of the configuration body, as fed to prompts.
std::string render_config(const Config& config);

struct DocumentSpec {
  std::string id;
  Language language = Language::EN;
  std::string scenario;
  /// Meta key -> config leaf path, e.g. {"court", "courtAndProcuratorate/court"}.
  std::vector<std::pair<std::string, std::string>> meta_paths;
};

struct GeneratedDocument {
  Document document;
  std::vector<std::string> warnings;
};

/// One chat call with the configuration in the scenario prompt. Warns
/// "unrealized fact: <leaf>" for each Rule leaf whose value does not occur
/// in the text. Throws GatewayError on an empty completion.
GeneratedDocument generate_document(const Config& config, const PromptTemplate& scenario_prompt,
                                    const DocumentSpec& spec, Gateway& llm,
                                    const GenerationOptions& options = {});

struct RefinementEdit {
  enum class Kind { Supplement, Delete };
  std::size_t round = 0;
  Kind kind = Kind::Supplement;
  std::string text;
};

struct QraDraft {
  std::string question;
  std::string answer;
  QuestionType question_type = QuestionType::Factual;
  Language language = Language::EN;
  std::vector<std::string> document_ids;
  std::vector<GroundTruthReference> references;
  std::vector<RefinementEdit> refinement_log;
  std::vector<std::string> warnings;
  /// Set when refinement stopped on a failure; the draft keeps its last
  /// consistent state.
  std::optional<std::string> error;
};

/// A document together with the configuration it was written from.
struct SourceDocument {
  const Document* document = nullptr;
  const Config* config = nullptr;
};

/// Uses the per-type prompt. Multi-document types take two sources, all
/// others exactly one. Unanswerable answers must state that the
/// information is insufficient. One retry with a format reminder, then
/// CompletionParseError.
QraDraft generate_qra(std::span<const SourceDocument> sources, QuestionType qtype, Gateway& llm,
                      const GenerationOptions& options = {});

/// True when an answer declares the documents insufficient.
bool asserts_insufficiency(std::string_view answer);

/// Asks for supporting excerpts and keeps those found in a source document.
/// Each one is widened to whole sentences and stored as the exact document
/// substring. Overlapping excerpts merge; unlocatable ones are dropped with
/// a warning.
QraDraft extract_references(std::span<const Document* const> documents, QraDraft draft,
                            Gateway& llm, const GenerationOptions& options = {});

inline constexpr std::size_t kDefaultRefineRounds = 2;

/// Up to `rounds` rounds of supplement/delete edits against the references;
/// stops after a round that changes nothing.
QraDraft refine_answer(QraDraft draft, Gateway& llm, std::size_t rounds = kDefaultRefineRounds,
                       const GenerationOptions& options = {});

struct KeypointExtraction {
  std::vector<std::string> keypoints;
  std::vector<std::string> warnings;
};

/// Numbered list items of a completion ("1. ...", "2) ...", "3、...").
std::vector<std::string> parse_numbered_list(std::string_view text);

KeypointExtraction extract_keypoints(std::string_view question, std::string_view answer,
                                     Gateway& llm, const GenerationOptions& options = {});

// Whole-pipeline driver.

struct ScenarioSpec {
  std::string name;
  std::filesystem::path schema;
  std::filesystem::path rules;
  /// Document prompt, relative to the template directory.
  std::string document_template;
  std::vector<Language> languages;
  std::size_t documents_per_language = 1;
  std::vector<std::pair<std::string, std::string>> meta_paths;
};

struct PipelineSpec {
  std::uint64_t seed = 0;
  GenerationOptions options;
  std::vector<ScenarioSpec> scenarios;
  /// Drafts per document for each question type. Multi-document types pair
  /// each document with the next one of the same scenario and language.
  std::map<QuestionType, std::size_t> questions_per_document;
  std::size_t refine_rounds = kDefaultRefineRounds;
  /// Endpoint settings from the config's "gateway" object.
  GatewayConfig gateway;

  /// Relative paths resolve against `base_dir`.
  static PipelineSpec from_json(const nlohmann::json& json,
                                const std::filesystem::path& base_dir);
  static PipelineSpec load(const std::filesystem::path& path);
};

struct PipelineResult {
  EvalDataset dataset;
  std::vector<Config> configs;
  std::vector<std::string> warnings;
  /// Items that were dropped, with the reason.
  std::vector<std::string> failures;
};

/// Runs configuration, document, QRA, reference, refinement and keypoint
/// stages with up to `jobs` workers. Output order depends only on the spec.
PipelineResult run_pipeline(const PipelineSpec& spec, Gateway& llm, std::size_t jobs = 4);

}  // namespace ragscope
