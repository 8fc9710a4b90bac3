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

#include "ragscope/genpipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <set>

#include "ragscope/error.hpp"
#include "ragscope/parallel.hpp"
#include "ragscope/rng.hpp"
#include "ragscope/templates.hpp"
#include "ragscope/textproc.hpp"

namespace ragscope {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Paths and tree navigation.

struct Segment {
  std::string key;  // empty for a list index
  std::size_t index = 0;
  bool is_index = false;
};

std::vector<Segment> parse_path(std::string_view path) {
  std::vector<Segment> out;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    if (path[i] == '[') {
      const auto close = path.find(']', i);
      if (close == std::string_view::npos) throw ConfigError("bad leaf path " + std::string(path));
      Segment seg;
      seg.is_index = true;
      seg.index = std::stoul(std::string(path.substr(i + 1, close - i - 1)));
      out.push_back(seg);
      i = close + 1;
      continue;
    }
    const auto end = path.find_first_of("/[", i);
    Segment seg;
    seg.key = std::string(path.substr(i, end == std::string_view::npos ? end : end - i));
    out.push_back(seg);
    i = end == std::string_view::npos ? path.size() : end;
  }
  return out;
}

Tree* tree_at(Tree& root, std::string_view path) {
  Tree* node = &root;
  for (const auto& seg : parse_path(path)) {
    if (seg.is_index) {
      if (!node->is_array() || seg.index >= node->size()) return nullptr;
      node = &(*node)[seg.index];
    } else {
      if (!node->is_object() || !node->contains(seg.key)) return nullptr;
      node = &(*node)[seg.key];
    }
  }
  return node;
}

const Tree* tree_at(const Tree& root, std::string_view path) {
  return tree_at(const_cast<Tree&>(root), path);
}

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "/" + key;
}

void collect_leaves(const Tree& node, const std::string& path, std::vector<std::string>& out) {
  if (node.is_object()) {
    for (const auto& [key, child] : node.items()) collect_leaves(child, join_path(path, key), out);
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      collect_leaves(node[i], path + "[" + std::to_string(i) + "]", out);
    }
  } else {
    out.push_back(path);
  }
}

std::string parent_path(std::string_view path) {
  const auto bracket = path.rfind('[');
  const auto slash = path.rfind('/');
  if (slash == std::string_view::npos && bracket == std::string_view::npos) return "";
  if (slash == std::string_view::npos) return std::string(path.substr(0, bracket));
  if (bracket == std::string_view::npos || slash > bracket) return std::string(path.substr(0, slash));
  return std::string(path.substr(0, bracket));
}

std::string leaf_key(std::string_view path) {
  auto last = path.substr(path.rfind('/') == std::string_view::npos ? 0 : path.rfind('/') + 1);
  if (const auto b = last.find('['); b != std::string_view::npos) last = last.substr(0, b);
  return std::string(last);
}

// ---------------------------------------------------------------------------
// Schema normalization.

bool is_concrete_key(std::string_view key) {
  if (key.empty()) return false;
  if (key.front() >= 'A' && key.front() <= 'Z') return true;
  return std::any_of(key.begin(), key.end(), [](char c) {
    return c == ' ' || static_cast<unsigned char>(c) >= 0x80;
  });
}

Tree normalize_node(const Tree& node) {
  if (node.is_string()) return node;
  if (node.is_array()) {
    Tree out = Tree::array();
    for (const auto& child : node) out.push_back(normalize_node(child));
    return out;
  }
  if (!node.is_object()) {
    throw ConfigError("schema leaves must be strings, found " + std::string(node.type_name()));
  }
  Tree out = Tree::object();
  for (const auto& [key, child] : node.items()) out[key] = normalize_node(child);
  if (out.empty()) return out;
  for (const auto& [key, child] : out.items()) {
    if (!is_concrete_key(key) || !child.is_object()) return out;
  }
  std::vector<std::string> fields;
  for (const auto& [key, child] : out.items()) {
    for (const auto& [field, _] : child.items()) {
      if (field != "event" && std::find(fields.begin(), fields.end(), field) == fields.end()) {
        fields.push_back(field);
      }
    }
  }
  Tree list = Tree::array();
  for (const auto& [key, child] : out.items()) {
    Tree entry = Tree::object();
    entry["event"] = key;
    for (const auto& field : fields) entry[field] = child.contains(field) ? child[field] : Tree("");
    list.push_back(std::move(entry));
  }
  return list;
}

// ---------------------------------------------------------------------------
// Seeded draws.

std::chrono::sys_days parse_iso_date(const std::string& text) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (std::sscanf(text.c_str(), "%d-%u-%u", &y, &m, &d) != 3) {
    throw ConfigError("bad ISO date " + text);
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                        std::chrono::day{d}};
  if (!ymd.ok()) throw ConfigError("bad ISO date " + text);
  return std::chrono::sys_days{ymd};
}

std::string format_date(std::chrono::sys_days day, const std::string& format) {
  static constexpr const char* kMonths[] = {"January", "February", "March",     "April",
                                            "May",     "June",     "July",      "August",
                                            "September", "October", "November", "December"};
  const std::chrono::year_month_day ymd{day};
  const int y = static_cast<int>(ymd.year());
  const unsigned m = static_cast<unsigned>(ymd.month());
  const unsigned d = static_cast<unsigned>(ymd.day());
  char buf[64];
  if (format == "iso") {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
  } else if (format == "long") {
    std::snprintf(buf, sizeof buf, "%s %u, %d", kMonths[m - 1], d, y);
  } else if (format == "ordinal") {
    const char* suffix = (d % 10 == 1 && d != 11)   ? "st"
                         : (d % 10 == 2 && d != 12) ? "nd"
                         : (d % 10 == 3 && d != 13) ? "rd"
                                                    : "th";
    std::snprintf(buf, sizeof buf, "%u%s %s %d", d, suffix, kMonths[m - 1], y);
  } else if (format == "us") {
    std::snprintf(buf, sizeof buf, "%02u/%02u/%04d", m, d, y);
  } else if (format == "cn") {
    std::snprintf(buf, sizeof buf, "%d年%u月%u日", y, m, d);
  } else {
    throw ConfigError("unknown date format " + format);
  }
  return buf;
}

std::string draw_value(const LeafRule& rule, std::mt19937_64& rng) {
  switch (rule.kind) {
    case LeafRule::Kind::Choice: {
      const auto i = draw_int(rng, 0, static_cast<std::int64_t>(rule.values.size()) - 1);
      return rule.values[static_cast<std::size_t>(i)];
    }
    case LeafRule::Kind::IntRange:
      return rule.prefix + std::to_string(draw_int(rng, rule.min, rule.max)) + rule.suffix;
    case LeafRule::Kind::DateRange: {
      const auto from = parse_iso_date(rule.date_from).time_since_epoch().count();
      const auto to = parse_iso_date(rule.date_to).time_since_epoch().count();
      const auto pick = draw_int(rng, from, to);
      return rule.prefix +
             format_date(std::chrono::sys_days{std::chrono::days{pick}}, rule.date_format) +
             rule.suffix;
    }
    case LeafRule::Kind::Llm: break;
  }
  throw ConfigError("LLM leaves are not drawn");
}

// ---------------------------------------------------------------------------
// Chat helpers.

std::string language_name(Language lang) { return lang == Language::EN ? "English" : "Chinese"; }

std::string ask(Gateway& llm, const GenerationOptions& options, const std::string& prompt,
                int max_new_tokens) {
  ChatRequest request;
  request.model = options.model;
  request.user = prompt;
  request.temperature = options.temperature;
  request.top_p = options.top_p;
  request.max_new_tokens = max_new_tokens;
  return llm.chat_complete(request);
}

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

std::string clean_leaf_value(std::string_view completion) {
  std::string value;
  std::size_t pos = 0;
  while (pos <= completion.size()) {
    const auto nl = completion.find('\n', pos);
    value = trim(completion.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    if (!value.empty() || nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
    value = value.substr(1, value.size() - 2);
  }
  return trim(value);
}

// First JSON value of the given type embedded in a completion.
std::optional<json> embedded_json(std::string_view text, char open, char close) {
  const auto first = text.find(open);
  const auto last = text.rfind(close);
  if (first == std::string_view::npos || last == std::string_view::npos || last < first) {
    return std::nullopt;
  }
  auto parsed = json::parse(text.substr(first, last - first + 1), nullptr, false);
  if (parsed.is_discarded()) return std::nullopt;
  return parsed;
}

bool starts_with_label(std::string_view line, std::string_view label, std::string_view& rest) {
  for (std::string_view colon : {":", "："}) {
    const std::string full = std::string(label) + std::string(colon);
    if (line.starts_with(full)) {
      rest = line.substr(full.size());
      return true;
    }
  }
  return false;
}

std::optional<std::pair<std::string, std::string>> parse_question_answer(std::string_view text) {
  std::string question, answer;
  enum { None, InQuestion, InAnswer } state = None;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line_raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                        : nl - pos);
    const auto line = std::string_view(line_raw).substr(
        std::min(line_raw.find_first_not_of(" \t*"), line_raw.size()));
    std::string_view rest;
    if (state == None && (starts_with_label(line, "Question", rest) ||
                          starts_with_label(line, "问题", rest))) {
      question = std::string(rest);
      state = InQuestion;
    } else if (state != None && (starts_with_label(line, "Answer", rest) ||
                                 starts_with_label(line, "答案", rest))) {
      if (state == InAnswer) break;
      answer = std::string(rest);
      state = InAnswer;
    } else if (state == InQuestion) {
      question += "\n" + std::string(line_raw);
    } else if (state == InAnswer) {
      answer += "\n" + std::string(line_raw);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  question = trim(question);
  answer = trim(answer);
  if (question.empty() || answer.empty()) return std::nullopt;
  return std::make_pair(question, answer);
}

std::string render_documents(std::span<const Document* const> documents) {
  std::string out;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += "Document " + std::to_string(i + 1) + " (" + documents[i]->id + "):\n" +
           documents[i]->text;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Tree normalize_schema(const Tree& raw) {
  if (raw.is_null()) return Tree::object();
  return normalize_node(raw);
}

Schema normalize_schema(const Schema& raw) { return {raw.scenario, normalize_schema(raw.body)}; }

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read schema " + path.string());
  const auto doc = Tree::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("schema")) {
    throw ConfigError("schema file " + path.string() + " needs a \"schema\" object");
  }
  return {doc.value("scenario", path.stem().string()), doc["schema"]};
}

std::string wildcard_path(std::string_view path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    out.push_back(path[i]);
    if (path[i] == '[') {
      const auto close = path.find(']', i);
      if (close == std::string_view::npos) break;
      i = close - 1;
    }
  }
  return out;
}

std::vector<std::string> leaf_paths(const Tree& tree) {
  std::vector<std::string> out;
  collect_leaves(tree, "", out);
  return out;
}

RuleTable RuleTable::from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("rule table must be a JSON object");
  RuleTable table;
  for (const auto& [path, spec] : doc.items()) {
    if (!spec.is_object() || !spec.contains("kind")) {
      throw ConfigError("rule for " + path + " needs a \"kind\"");
    }
    LeafRule rule;
    const auto kind = spec["kind"].get<std::string>();
    rule.prefix = spec.value("prefix", "");
    rule.suffix = spec.value("suffix", "");
    if (kind == "choice") {
      rule.kind = LeafRule::Kind::Choice;
      rule.values = spec.at("values").get<std::vector<std::string>>();
      if (rule.values.empty()) throw ConfigError("rule for " + path + " has no values");
    } else if (kind == "int_range") {
      rule.kind = LeafRule::Kind::IntRange;
      rule.min = spec.at("min").get<std::int64_t>();
      rule.max = spec.at("max").get<std::int64_t>();
      if (rule.min > rule.max) throw ConfigError("rule for " + path + " has min > max");
    } else if (kind == "date_range") {
      rule.kind = LeafRule::Kind::DateRange;
      rule.date_from = spec.at("from").get<std::string>();
      rule.date_to = spec.at("to").get<std::string>();
      rule.date_format = spec.value("format", "iso");
      if (parse_iso_date(rule.date_from) > parse_iso_date(rule.date_to)) {
        throw ConfigError("rule for " + path + " has from > to");
      }
      format_date(parse_iso_date(rule.date_from), rule.date_format);
    } else if (kind == "llm") {
      rule.kind = LeafRule::Kind::Llm;
      if (spec.contains("prompt")) rule.prompt = spec["prompt"].get<std::string>();
    } else {
      throw ConfigError("unknown rule kind " + kind + " for " + path);
    }
    table.set(path, std::move(rule));
  }
  return table;
}

RuleTable RuleTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read rules " + path.string());
  const auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("malformed rules " + path.string());
  return from_json(doc);
}

const LeafRule* RuleTable::find(std::string_view path) const {
  if (auto it = rules_.find(path); it != rules_.end()) return &it->second;
  if (auto it = rules_.find(wildcard_path(path)); it != rules_.end()) return &it->second;
  return nullptr;
}

std::string render_config(const Config& config) { return config.body.dump(2); }

Config generate_config(const Schema& schema, const RuleTable& rules, std::uint64_t seed,
                       Gateway* llm, const GenerationOptions& options) {
  Config config;
  config.schema_id = schema.scenario;
  config.body = schema.body;
  const auto paths = leaf_paths(schema.body);

  std::vector<std::pair<std::string, const LeafRule*>> llm_leaves;
  std::vector<std::pair<std::string, const LeafRule*>> rule_leaves;
  for (const auto& path : paths) {
    const Tree* leaf = tree_at(schema.body, path);
    if (!leaf->is_string()) throw ConfigError("schema leaf " + path + " is not a string");
    const LeafRule* rule = rules.find(path);
    if (rule == nullptr) {
      if (!leaf->get_ref<const std::string&>().empty()) {
        config.provenance[path] = Provenance::Rule;
        continue;
      }
      throw ConfigError("uncovered leaf: " + path);
    }
    if (rule->kind == LeafRule::Kind::Llm) {
      llm_leaves.emplace_back(path, rule);
    } else {
      rule_leaves.emplace_back(path, rule);
    }
  }
  if (!llm_leaves.empty() && llm == nullptr) {
    throw ConfigError("LLM leaf " + llm_leaves.front().first + " requires a gateway");
  }

  std::mt19937_64 rng(splitmix64(seed));
  for (const auto& [path, rule] : rule_leaves) {
    *tree_at(config.body, path) = draw_value(*rule, rng);
    config.provenance[path] = Provenance::Rule;
  }

  const auto default_prompt = load_template(options.template_dir, kConfigLeafTemplate);
  for (const auto& [path, rule] : llm_leaves) {
    const Tree* parent = tree_at(config.body, parent_path(path));
    const std::string leaf = leaf_key(path);
    const auto resolve = [&](std::string_view name) -> std::optional<std::string> {
      if (name == "scenario") return schema.scenario;
      if (name == "config") return render_config(config);
      if (name == "parent") return parent ? parent->dump(2) : std::string("{}");
      if (name == "leaf") return leaf;
      if (name == "path") return path;
      return std::nullopt;
    };
    const auto prompt = rule->prompt ? PromptTemplate(*rule->prompt, "rule:" + path).render(resolve)
                                     : default_prompt.render(resolve);
    auto value = clean_leaf_value(ask(*llm, options, prompt, options.max_new_tokens));
    if (value.empty()) {
      throw CompletionParseError("empty value for leaf " + path, value);
    }
    *tree_at(config.body, path) = value;
    config.provenance[path] = Provenance::Llm;
  }
  return config;
}

GeneratedDocument generate_document(const Config& config, const PromptTemplate& scenario_prompt,
                                    const DocumentSpec& spec, Gateway& llm,
                                    const GenerationOptions& options) {
  GeneratedDocument out;
  out.document.id = spec.id;
  out.document.language = spec.language;
  out.document.scenario = spec.scenario;
  for (const auto& [key, path] : spec.meta_paths) {
    const Tree* value = tree_at(config.body, path);
    if (value == nullptr || !value->is_string()) {
      throw ConfigError("meta path " + path + " is not a configuration leaf");
    }
    out.document.meta.emplace_back(key, value->get<std::string>());
  }
  const auto prompt = scenario_prompt.render({{"language", language_name(spec.language)},
                                              {"scenario", spec.scenario},
                                              {"config", render_config(config)}});
  const auto text = trim(nfc(ask(llm, options, prompt, options.document_max_new_tokens)));
  if (text.empty()) throw GatewayError("empty completion for document " + spec.id);
  out.document.text = text;

  const auto haystack = normalize(text);
  for (const auto& [path, provenance] : config.provenance) {
    if (provenance != Provenance::Rule) continue;
    const auto value = normalize(tree_at(config.body, path)->get<std::string>());
    if (!value.empty() && haystack.find(value) == std::string::npos) {
      out.warnings.push_back("unrealized fact: " + leaf_key(path));
    }
  }
  return out;
}

bool asserts_insufficiency(std::string_view answer) {
  static const std::vector<std::string> kMarkers = {
      "not provide sufficient", "insufficient", "not sufficient", "does not provide",
      "do not provide",         "not mention",  "no information", "cannot be determined",
      "无法",                   "未提供",       "没有提供",       "不足",
      "未提及",                 "没有提及"};
  const auto text = fold_case(normalize(answer));
  return std::any_of(kMarkers.begin(), kMarkers.end(),
                     [&](const std::string& m) { return text.find(m) != std::string::npos; });
}

QraDraft generate_qra(std::span<const SourceDocument> sources, QuestionType qtype, Gateway& llm,
                      const GenerationOptions& options) {
  const std::size_t needed = is_multi_document(qtype) ? 2 : 1;
  if (sources.size() != needed) {
    throw PreconditionError(std::string(short_code(qtype)) + " takes " + std::to_string(needed) +
                            " source document(s), got " + std::to_string(sources.size()));
  }
  std::vector<const Document*> docs;
  std::string configs;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].document == nullptr || sources[i].config == nullptr) {
      throw PreconditionError("source without document or configuration");
    }
    docs.push_back(sources[i].document);
    if (i > 0) configs += "\n\n";
    configs += "Configuration " + std::to_string(i + 1) + ":\n" + render_config(*sources[i].config);
  }
  const auto tmpl = load_template(options.template_dir, qra_template_path(short_code(qtype)));
  const auto prompt = tmpl.render({{"scenario", docs.front()->scenario},
                                   {"language", language_name(docs.front()->language)},
                                   {"definition", std::string(definition(qtype))},
                                   {"configs", configs},
                                   {"documents", render_documents(docs)}});
  const auto accept = [&](const std::string& completion)
      -> std::optional<std::pair<std::string, std::string>> {
    auto qa = parse_question_answer(completion);
    if (qa && qtype == QuestionType::Unanswerable && !asserts_insufficiency(qa->second)) {
      return std::nullopt;
    }
    return qa;
  };
  auto completion = ask(llm, options, prompt, options.max_new_tokens);
  auto qa = accept(completion);
  if (!qa) {
    std::string reminder =
        "\n\nFormat reminder: reply with exactly two lines, \"Question: ...\" and \"Answer: ...\".";
    if (qtype == QuestionType::Unanswerable) {
      reminder += " The answer must state that the documents do not provide sufficient "
                  "information.";
    }
    const auto retry = ask(llm, options, prompt + reminder, options.max_new_tokens);
    qa = accept(retry);
    if (!qa) {
      throw CompletionParseError("no question/answer pair in completion after retry",
                                 completion + "\n----- retry -----\n" + retry);
    }
  }
  QraDraft draft;
  draft.question = qa->first;
  draft.answer = qa->second;
  draft.question_type = qtype;
  draft.language = docs.front()->language;
  for (const auto* doc : docs) draft.document_ids.push_back(doc->id);
  return draft;
}

QraDraft extract_references(std::span<const Document* const> documents, QraDraft draft,
                            Gateway& llm, const GenerationOptions& options) {
  if (draft.question.empty() || draft.answer.empty()) {
    throw PreconditionError("draft needs a question and an answer");
  }
  const auto tmpl = load_template(options.template_dir, kReferenceTemplate);
  const auto prompt = tmpl.render({{"documents", render_documents(documents)},
                                   {"question", draft.question},
                                   {"answer", draft.answer}});
  const auto parse = [](const std::string& completion) -> std::optional<std::vector<std::string>> {
    auto parsed = embedded_json(completion, '[', ']');
    if (!parsed || !parsed->is_array()) return std::nullopt;
    std::vector<std::string> out;
    for (const auto& item : *parsed) {
      if (!item.is_string()) return std::nullopt;
      out.push_back(item.get<std::string>());
    }
    return out;
  };
  auto completion = ask(llm, options, prompt, options.max_new_tokens);
  auto excerpts = parse(completion);
  if (!excerpts) {
    const auto retry = ask(llm, options,
                           prompt + "\n\nFormat reminder: reply with a JSON array of strings only.",
                           options.max_new_tokens);
    excerpts = parse(retry);
    if (!excerpts) {
      throw CompletionParseError("no JSON array of excerpts after retry",
                                 completion + "\n----- retry -----\n" + retry);
    }
  }

  std::vector<std::string> texts;
  for (const auto* doc : documents) texts.push_back(nfc(doc->text));
  std::vector<std::pair<std::size_t, TextSpan>> found;
  for (const auto& excerpt : *excerpts) {
    if (normalize(excerpt).empty()) continue;
    bool located = false;
    for (std::size_t d = 0; d < documents.size() && !located; ++d) {
      if (auto span = locate_normalized(texts[d], excerpt)) {
        found.emplace_back(d, snap_to_sentences(texts[d], documents[d]->language, *span));
        located = true;
      }
    }
    if (!located) draft.warnings.push_back("unlocatable reference dropped: " + excerpt);
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second.begin < b.second.begin;
  });
  std::vector<std::pair<std::size_t, TextSpan>> merged;
  for (const auto& item : found) {
    if (!merged.empty() && merged.back().first == item.first &&
        item.second.begin < merged.back().second.end) {
      merged.back().second.end = std::max(merged.back().second.end, item.second.end);
    } else {
      merged.push_back(item);
    }
  }
  draft.references.clear();
  for (const auto& [d, span] : merged) {
    draft.references.push_back({documents[d]->id, texts[d].substr(span.begin, span.size())});
  }
  return draft;
}

QraDraft refine_answer(QraDraft draft, Gateway& llm, std::size_t rounds,
                       const GenerationOptions& options) {
  if (rounds == 0) return draft;
  const auto tmpl = load_template(options.template_dir, kRefineTemplate);
  for (std::size_t round = 1; round <= rounds; ++round) {
    std::string refs;
    for (std::size_t i = 0; i < draft.references.size(); ++i) {
      if (i > 0) refs += '\n';
      refs += "[" + std::to_string(i + 1) + "] " + normalize(draft.references[i].text);
    }
    const auto prompt = tmpl.render({{"question", draft.question},
                                     {"answer", draft.answer},
                                     {"references", refs.empty() ? std::string("(none)") : refs}});
    std::optional<json> edits;
    try {
      const auto completion = ask(llm, options, prompt, options.max_new_tokens);
      edits = embedded_json(completion, '{', '}');
      if (!edits || !edits->is_object()) {
        draft.error = "round " + std::to_string(round) + ": no JSON edit object in completion";
        return draft;
      }
    } catch (const GatewayError& e) {
      draft.error = "round " + std::to_string(round) + ": " + e.what();
      return draft;
    }
    const auto list = [&](const char* key) {
      std::vector<std::string> out;
      if (edits->contains(key) && (*edits)[key].is_array()) {
        for (const auto& item : (*edits)[key]) {
          if (item.is_string() && !normalize(item.get<std::string>()).empty()) {
            out.push_back(item.get<std::string>());
          }
        }
      }
      return out;
    };
    std::size_t applied = 0;
    for (const auto& text : list("delete")) {
      auto span = locate_normalized(draft.answer, text);
      if (!span) {
        draft.warnings.push_back("refinement delete not found in answer: " + text);
        continue;
      }
      std::string next = draft.answer.substr(0, span->begin) + draft.answer.substr(span->end);
      next = normalize(next);
      if (next.empty()) {
        draft.warnings.push_back("refinement delete would empty the answer: " + text);
        continue;
      }
      draft.answer = next;
      draft.refinement_log.push_back({round, RefinementEdit::Kind::Delete, text});
      ++applied;
    }
    for (const auto& text : list("supplement")) {
      if (normalize(draft.answer).find(normalize(text)) != std::string::npos) continue;
      draft.answer = normalize(draft.answer + " " + text);
      draft.refinement_log.push_back({round, RefinementEdit::Kind::Supplement, text});
      ++applied;
    }
    if (applied == 0) break;
  }
  return draft;
}

std::vector<std::string> parse_numbered_list(std::string_view text) {
  std::vector<std::string> items;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    const auto start = line.find_first_not_of(" \t");
    if (start != std::string_view::npos) {
      line = line.substr(start);
      std::size_t i = 0;
      while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
      if (i > 0 && i < line.size()) {
        std::string_view rest = line.substr(i);
        for (std::string_view sep : {".", ")", "、", "．"}) {
          if (rest.starts_with(sep)) {
            const auto item = trim(rest.substr(sep.size()));
            if (!item.empty()) items.push_back(item);
            break;
          }
        }
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return items;
}

KeypointExtraction extract_keypoints(std::string_view question, std::string_view answer,
                                     Gateway& llm, const GenerationOptions& options) {
  if (normalize(answer).empty()) throw PreconditionError("empty answer");
  const auto tmpl = load_template(options.template_dir, kKeypointTemplate);
  const auto prompt =
      tmpl.render({{"question", std::string(question)}, {"ground_truth", std::string(answer)}});
  KeypointExtraction out;
  const auto completion = ask(llm, options, prompt, options.max_new_tokens);
  out.keypoints = parse_numbered_list(completion);
  if (out.keypoints.empty()) {
    const auto retry = ask(llm, options,
                           prompt + "\n\nFormat reminder: list the key points as a numbered "
                                    "list, one per line: \"1. ...\", \"2. ...\".",
                           options.max_new_tokens);
    out.keypoints = parse_numbered_list(retry);
    if (out.keypoints.empty()) {
      throw CompletionParseError("no numbered key points after retry",
                                 completion + "\n----- retry -----\n" + retry);
    }
  }
  if (out.keypoints.size() < 3 || out.keypoints.size() > 5) {
    out.warnings.push_back("keypoints=" + std::to_string(out.keypoints.size()) +
                           " outside 3-5");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Driver.

PipelineSpec PipelineSpec::from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("pipeline config must be a JSON object");
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  PipelineSpec spec;
  spec.seed = doc.value("seed", std::uint64_t{0});
  spec.refine_rounds = doc.value("refine_rounds", kDefaultRefineRounds);
  if (doc.contains("generation")) {
    const auto& g = doc["generation"];
    spec.options.model = g.value("model", spec.options.model);
    spec.options.temperature = g.value("temperature", spec.options.temperature);
    spec.options.top_p = g.value("top_p", spec.options.top_p);
    spec.options.max_new_tokens = g.value("max_new_tokens", spec.options.max_new_tokens);
    spec.options.document_max_new_tokens =
        g.value("document_max_new_tokens", spec.options.document_max_new_tokens);
  }
  if (doc.contains("templates")) spec.options.template_dir = resolve(doc["templates"]);
  if (doc.contains("gateway")) {
    const auto& g = doc["gateway"];
    spec.gateway.base_url = g.value("base_url", spec.gateway.base_url);
    spec.gateway.api_key_env = g.value("api_key_env", spec.gateway.api_key_env);
    spec.gateway.max_in_flight = g.value("max_in_flight", spec.gateway.max_in_flight);
    if (g.contains("cache_dir")) spec.gateway.cache_dir = resolve(g["cache_dir"]);
  }
  if (!doc.contains("scenarios") || !doc["scenarios"].is_array()) {
    throw ConfigError("pipeline config needs a \"scenarios\" array");
  }
  for (const auto& s : doc["scenarios"]) {
    ScenarioSpec scenario;
    scenario.name = s.at("name").get<std::string>();
    scenario.schema = resolve(s.at("schema").get<std::string>());
    scenario.rules = resolve(s.at("rules").get<std::string>());
    scenario.document_template = s.at("document_template").get<std::string>();
    for (const auto& lang : s.value("languages", std::vector<std::string>{"EN"})) {
      scenario.languages.push_back(parse_language(lang));
    }
    scenario.documents_per_language = s.value("documents_per_language", std::size_t{1});
    if (s.contains("meta")) {
      for (const auto& [key, path] : s["meta"].items()) {
        scenario.meta_paths.emplace_back(key, path.get<std::string>());
      }
    }
    spec.scenarios.push_back(std::move(scenario));
  }
  if (doc.contains("questions_per_document")) {
    for (const auto& [code, n] : doc["questions_per_document"].items()) {
      spec.questions_per_document[parse_question_type(code)] = n.get<std::size_t>();
    }
  } else {
    for (auto t : kAllQuestionTypes) spec.questions_per_document[t] = 1;
  }
  return spec;
}

PipelineSpec PipelineSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read pipeline config " + path.string());
  const auto doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("malformed pipeline config " + path.string());
  return from_json(doc, path.parent_path());
}

namespace {

struct DocJob {
  const ScenarioSpec* scenario;
  const Schema* schema;
  const RuleTable* rules;
  DocumentSpec spec;
  std::uint64_t seed;
};

struct DocOutcome {
  std::optional<Config> config;
  std::optional<Document> document;
  std::vector<std::string> warnings;
  std::optional<std::string> failure;
};

struct RecordJob {
  std::string id;
  QuestionType type;
  std::vector<std::size_t> docs;  // indices into the doc outcomes
};

struct RecordOutcome {
  std::optional<QraRecord> record;
  std::vector<std::string> warnings;
  std::optional<std::string> failure;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

PipelineResult run_pipeline(const PipelineSpec& spec, Gateway& llm, std::size_t jobs) {
  std::vector<Schema> schemas;
  std::vector<RuleTable> rules;
  schemas.reserve(spec.scenarios.size());
  rules.reserve(spec.scenarios.size());
  for (const auto& scenario : spec.scenarios) {
    auto schema = normalize_schema(load_schema(scenario.schema));
    schema.scenario = scenario.name;
    schemas.push_back(std::move(schema));
    rules.push_back(RuleTable::load(scenario.rules));
  }

  std::vector<DocJob> doc_jobs;
  std::vector<std::vector<std::size_t>> groups;  // same scenario and language
  for (std::size_t s = 0; s < spec.scenarios.size(); ++s) {
    const auto& scenario = spec.scenarios[s];
    for (auto lang : scenario.languages) {
      groups.emplace_back();
      for (std::size_t i = 0; i < scenario.documents_per_language; ++i) {
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "%03zu", i);
        DocJob job{&scenario, &schemas[s], &rules[s], {}, 0};
        job.spec.id = scenario.name + "-" + lower(to_string(lang)) + "-" + suffix;
        job.spec.language = lang;
        job.spec.scenario = scenario.name;
        job.spec.meta_paths = scenario.meta_paths;
        job.seed = splitmix64(spec.seed ^ splitmix64(doc_jobs.size() + 1));
        groups.back().push_back(doc_jobs.size());
        doc_jobs.push_back(std::move(job));
      }
    }
  }

  std::vector<DocOutcome> docs(doc_jobs.size());
  parallel_for(doc_jobs.size(), jobs, [&](std::size_t i) {
    const auto& job = doc_jobs[i];
    try {
      auto config = generate_config(*job.schema, *job.rules, job.seed, &llm, spec.options);
      const auto tmpl = load_template(spec.options.template_dir, job.scenario->document_template);
      auto generated = generate_document(config, tmpl, job.spec, llm, spec.options);
      docs[i].config = std::move(config);
      docs[i].document = std::move(generated.document);
      for (auto& w : generated.warnings) docs[i].warnings.push_back(job.spec.id + ": " + w);
    } catch (const Error& e) {
      docs[i].failure = job.spec.id + ": " + e.what();
    }
  });

  std::vector<RecordJob> record_jobs;
  PipelineResult result;
  for (const auto& group : groups) {
    std::vector<std::size_t> alive;
    for (auto i : group) {
      if (docs[i].document) alive.push_back(i);
    }
    for (std::size_t a = 0; a < alive.size(); ++a) {
      const auto& doc_id = docs[alive[a]].document->id;
      for (auto type : kAllQuestionTypes) {
        const auto it = spec.questions_per_document.find(type);
        const std::size_t count = it == spec.questions_per_document.end() ? 0 : it->second;
        for (std::size_t j = 0; j < count; ++j) {
          RecordJob job{doc_id + "-" + std::string(short_code(type)) + "-" + std::to_string(j),
                        type,
                        {alive[a]}};
          if (is_multi_document(type)) {
            if (alive.size() < 2) {
              result.warnings.push_back(job.id + ": skipped, no second document in group");
              continue;
            }
            job.docs.push_back(alive[(a + 1) % alive.size()]);
          }
          record_jobs.push_back(std::move(job));
        }
      }
    }
  }

  std::vector<RecordOutcome> records(record_jobs.size());
  parallel_for(record_jobs.size(), jobs, [&](std::size_t i) {
    const auto& job = record_jobs[i];
    auto& out = records[i];
    try {
      std::vector<SourceDocument> sources;
      std::vector<const Document*> documents;
      for (auto d : job.docs) {
        sources.push_back({&*docs[d].document, &*docs[d].config});
        documents.push_back(&*docs[d].document);
      }
      auto draft = generate_qra(sources, job.type, llm, spec.options);
      if (job.type != QuestionType::Unanswerable) {
        draft = extract_references(documents, std::move(draft), llm, spec.options);
        if (draft.references.empty()) {
          out.failure = job.id + ": no locatable references";
          return;
        }
        draft = refine_answer(std::move(draft), llm, spec.refine_rounds, spec.options);
        if (draft.error) out.warnings.push_back(job.id + ": refinement stopped, " + *draft.error);
      }
      auto keypoints = extract_keypoints(draft.question, draft.answer, llm, spec.options);
      for (auto& w : draft.warnings) out.warnings.push_back(job.id + ": " + w);
      for (auto& w : keypoints.warnings) out.warnings.push_back(job.id + ": " + w);
      QraRecord record;
      record.id = job.id;
      record.question = draft.question;
      record.question_type = job.type;
      record.language = draft.language;
      record.document_ids = draft.document_ids;
      record.references = std::move(draft.references);
      record.answer = draft.answer;
      record.keypoints = std::move(keypoints.keypoints);
      out.record = std::move(record);
    } catch (const Error& e) {
      out.failure = job.id + ": " + e.what();
    }
  });

  std::vector<Document> documents;
  for (auto& d : docs) {
    for (auto& w : d.warnings) result.warnings.push_back(std::move(w));
    if (d.failure) result.failures.push_back(*d.failure);
    if (d.document) {
      documents.push_back(std::move(*d.document));
      result.configs.push_back(std::move(*d.config));
    }
  }
  std::vector<QraRecord> qra;
  for (auto& r : records) {
    for (auto& w : r.warnings) result.warnings.push_back(std::move(w));
    if (r.failure) result.failures.push_back(*r.failure);
    if (r.record) qra.push_back(std::move(*r.record));
  }
  result.dataset = EvalDataset(std::move(documents), std::move(qra));
  std::vector<QraRecord> kept;
  for (const auto& record : result.dataset.records()) {
    bool fatal = false;
    for (const auto& v : validate_record(record, result.dataset)) {
      result.warnings.push_back(record.id + ": " + v.field + ": " + v.message);
      fatal = fatal || v.severity == Severity::Error;
    }
    if (fatal) {
      result.failures.push_back(record.id + ": failed validation");
    } else {
      kept.push_back(record);
    }
  }
  if (kept.size() != result.dataset.records().size()) {
    result.dataset = EvalDataset(result.dataset.documents(), std::move(kept));
  }
  return result;
}

}  // namespace ragscope
