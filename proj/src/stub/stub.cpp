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

#include "ragscope/stub.hpp"

#include <algorithm>
#include <cstdint>
#include <set>

#include <httplib.h>

#include "ragscope/error.hpp"
#include "ragscope/judge.hpp"
#include "ragscope/textproc.hpp"

namespace ragscope::stub {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string between(std::string_view text, std::string_view open, std::string_view close,
                    bool last_open = false) {
  const auto a = last_open ? text.rfind(open) : text.find(open);
  if (a == std::string_view::npos) return "";
  const auto begin = a + open.size();
  const auto b = close.empty() ? std::string_view::npos : text.find(close, begin);
  return std::string(text.substr(begin, b == std::string_view::npos ? b : b - begin));
}

bool contains(std::string_view text, std::string_view part) {
  return text.find(part) != std::string_view::npos;
}

Language guess_language(std::string_view text) {
  return contains(text, "。") || contains(text, "，") ? Language::CN : Language::EN;
}

std::vector<std::string> sentences_of(std::string_view text) {
  std::vector<std::string> out;
  for (auto& s : split_sentences(text, guess_language(text))) out.push_back(std::move(s.text));
  return out;
}

// "judgmentDate" -> "judgment date".
std::string humanize(std::string_view key) {
  std::string out;
  for (std::size_t i = 0; i < key.size(); ++i) {
    const char c = key[i];
    if (c >= 'A' && c <= 'Z') {
      if (i > 0 && !out.empty() && out.back() != ' ') out += ' ';
      out += static_cast<char>(c - 'A' + 'a');
    } else if (c == '_') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

std::string upper(std::string text) {
  for (auto& c : text) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return text;
}

// --- configuration leaves --------------------------------------------------

std::string leaf_value(const std::string& prompt) {
  static const std::vector<std::string> kNames = {"A. Brown", "J. Gonzalez", "M. Smith",
                                                  "L. Chen",  "R. Patel",    "K. Novak",
                                                  "S. Okafor", "T. Larsen"};
  static const std::vector<std::string> kActions = {
      "approved falsified tax refunds for a group of local firms",
      "accepted payments in exchange for waiving audit findings",
      "redirected public funds into a private account",
      "issued permits without the required inspections",
      "concealed income from the annual declaration"};
  static const std::vector<std::string> kEvidence = {
      "email correspondence recovered from the office server",
      "bank records covering the whole period",
      "testimony of two former colleagues",
      "signed approval forms kept in the archive"};
  static const std::vector<std::string> kStreets = {
      "53, Bayside street, Clarksville", "12, Mill road, Hamilton", "7, Orchard lane, Easton"};
  static const std::vector<std::string> kJobs = {
      "Senior Inspector, Clarksville Tax Department", "Procurement Officer, Hamilton City Council",
      "Branch Manager, Easton Savings Bank"};
  static const std::vector<std::string> kConsiderations = {
      "the defendant abused a position of public trust",
      "the defendant confessed and returned the funds",
      "the offence continued over a long period"};
  const auto leaf = between(prompt, "The field \"", "\"");
  const auto h = fnv1a(prompt);
  const auto lower = humanize(leaf);
  if (contains(lower, "name")) return kNames[h % kNames.size()];
  if (contains(lower, "behavior") || contains(lower, "description") || contains(lower, "impact")) {
    return kActions[h % kActions.size()];
  }
  if (contains(lower, "evidence")) return kEvidence[h % kEvidence.size()];
  if (contains(lower, "residence") || contains(lower, "address")) {
    return kStreets[h % kStreets.size()];
  }
  if (contains(lower, "occupation")) return kJobs[h % kJobs.size()];
  if (contains(lower, "considerations")) return kConsiderations[h % kConsiderations.size()];
  return lower + " " + std::to_string(100 + h % 900);
}

// --- documents -------------------------------------------------------------

void describe(const ordered_json& node, const std::string& subject, Language lang,
              std::vector<std::string>& lines) {
  if (node.is_string()) {
    const auto value = node.get<std::string>();
    if (lang == Language::CN) {
      lines.push_back(subject + "为" + value + "。");
    } else {
      lines.push_back("The " + subject + " is " + value + ".");
    }
    return;
  }
  if (node.is_object()) {
    for (const auto& [key, child] : node.items()) {
      if (key == "event") continue;
      const auto field = humanize(key);
      describe(child, subject.empty() ? field : subject + " " + field, lang, lines);
    }
    return;
  }
  if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      const auto& entry = node[i];
      std::string label = subject + " entry " + std::to_string(i + 1);
      if (entry.is_object() && entry.contains("event") && entry["event"].is_string()) {
        label = entry["event"].get<std::string>();
        if (lang == Language::CN) {
          lines.push_back(subject + "包括" + label + "。");
        } else {
          lines.push_back("The " + subject + " includes " + label + ".");
        }
      }
      describe(entry, label, lang, lines);
    }
  }
}

std::string document_reply(const std::string& prompt) {
  const Language lang = contains(prompt, " in Chinese ") ? Language::CN : Language::EN;
  const auto scenario = between(prompt, " for the ", " scenario");
  const auto config_text = between(prompt, "\nConfiguration:\n", "\n\nDocument:", true);
  const auto config = ordered_json::parse(config_text, nullptr, false);
  std::string out = upper(scenario) + " RECORD\n";
  if (!config.is_object()) return out + config_text;
  for (const auto& [key, child] : config.items()) {
    out += "\n" + upper(humanize(key)) + "\n";
    std::vector<std::string> lines;
    describe(child, humanize(key), lang, lines);
    for (const auto& line : lines) out += line + "\n";
  }
  return out;
}

// --- questions -------------------------------------------------------------

struct DocBlock {
  std::string id;
  std::vector<std::string> sentences;
};

std::vector<DocBlock> documents_in(std::string_view section) {
  std::vector<DocBlock> out;
  std::size_t pos = 0;
  while (true) {
    const auto start = section.find("Document ", pos);
    if (start == std::string_view::npos) break;
    const auto open = section.find(" (", start);
    const auto close = section.find("):\n", start);
    if (open == std::string_view::npos || close == std::string_view::npos || open > close) break;
    DocBlock block;
    block.id = std::string(section.substr(open + 2, close - open - 2));
    const auto body_begin = close + 3;
    auto next = section.find("\n\nDocument ", body_begin);
    const auto body = section.substr(body_begin, next == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : next - body_begin);
    for (auto& s : sentences_of(body)) {
      if (s.ends_with(".") || s.ends_with("。")) block.sentences.push_back(std::move(s));
    }
    out.push_back(std::move(block));
    if (next == std::string_view::npos) break;
    pos = next + 2;
  }
  return out;
}

// Subject phrase of a generated sentence: "The defendant name is X." -> "the defendant name".
std::string subject_of(const std::string& sentence) {
  if (const auto at = sentence.find("为"); at != std::string::npos) return sentence.substr(0, at);
  if (const auto at = sentence.find(" is "); at != std::string::npos && sentence.starts_with("The ")) {
    return "the " + sentence.substr(4, at - 4);
  }
  if (const auto at = sentence.find(" includes "); at != std::string::npos &&
                                                   sentence.starts_with("The ")) {
    return "the events of the " + sentence.substr(4, at - 4);
  }
  return "the statement \"" + sentence + "\"";
}

std::string qra_reply(const std::string& prompt) {
  const auto type = between(prompt, "Question type: ", "\n");
  const auto docs = documents_in(between(prompt, "\nDocuments:\n", "\n\nRespond with", true));
  const Language lang = contains(prompt, " in Chinese.") ? Language::CN : Language::EN;
  const auto h = fnv1a(prompt);
  if (docs.empty() || docs.front().sentences.empty()) return "No documents.";
  const auto& d0 = docs.front();
  const auto pick = [&](const DocBlock& d, std::size_t salt) {
    return d.sentences[(h + salt * 7919) % d.sentences.size()];
  };
  const auto ask = [&](const std::string& id, const std::string& subject) {
    return lang == Language::CN ? "根据" + id + "，" + subject + "是什么？"
                                : "According to " + id + ", what is " + subject + "?";
  };
  std::string question, answer;
  if (type.starts_with("Unanswerable")) {
    question = lang == Language::CN ? "根据" + d0.id + "，当事人在2015年之前的雇主是谁？"
                                    : "According to " + d0.id +
                                          ", who employed the main party before 2015?";
    answer = lang == Language::CN ? "文档没有提供足够的信息来回答这个问题。"
                                  : "The document does not provide sufficient information to "
                                    "answer this question.";
  } else if (docs.size() >= 2) {
    const auto a = pick(d0, 1);
    const auto b = pick(docs[1], 2);
    question = lang == Language::CN
                   ? "比较" + d0.id + "中的" + subject_of(a) + "和" + docs[1].id + "中的" +
                         subject_of(b) + "。"
                   : "Compare " + subject_of(a) + " in " + d0.id + " with " + subject_of(b) +
                         " in " + docs[1].id + ".";
    answer = a + (lang == Language::CN ? "" : " ") + b;
  } else if (type.starts_with("Summar")) {
    const auto n = d0.sentences.size();
    const auto start = h % n;
    std::vector<std::string> chosen;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, n); ++i) {
      chosen.push_back(d0.sentences[(start + i) % n]);
    }
    question = lang == Language::CN ? "概述" + d0.id + "中关于" + subject_of(chosen[0]) + "的内容。"
                                    : "Summarize what " + d0.id + " records about " +
                                          subject_of(chosen[0]) + ".";
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      if (i > 0 && lang == Language::EN) answer += " ";
      answer += chosen[i];
    }
  } else if (type.starts_with("Multi")) {
    const auto a = pick(d0, 1);
    auto b = pick(d0, 3);
    if (b == a && d0.sentences.size() > 1) b = pick(d0, 4);
    question = lang == Language::CN ? "根据" + d0.id + "，" + subject_of(a) + "和" + subject_of(b) +
                                          "分别是什么？"
                                    : "According to " + d0.id + ", what are " + subject_of(a) +
                                          " and " + subject_of(b) + "?";
    answer = a == b ? a : a + (lang == Language::CN ? "" : " ") + b;
  } else {
    const auto a = pick(d0, 1);
    question = ask(d0.id, subject_of(a));
    answer = a;
  }
  return "Question: " + question + "\nAnswer: " + answer;
}

// --- other stages -----------------------------------------------------------

std::string references_reply(const std::string& prompt) {
  const auto answer = between(prompt, "\nAnswer: ", "\n\nReturn a JSON array", true);
  return json(sentences_of(answer)).dump();
}

std::string keypoints_reply(const std::string& prompt) {
  const auto answer = between(prompt, "\nStandard Answer: ", "\nKey Points:", true);
  std::string out;
  std::size_t i = 0;
  for (const auto& s : sentences_of(answer)) {
    out += std::to_string(++i) + ". " + s + "\n";
  }
  return out;
}

std::string eval_reply(const std::string& prompt) {
  const auto context = between(prompt, "References:\n", "\n\nQuestion: ");
  const auto question = between(prompt, "\n\nQuestion: ", "\nAnswer:", true);
  const Language lang = guess_language(context + question);
  const auto none = lang == Language::CN ? std::string("参考资料没有提供足够的信息。")
                                         : std::string("The references do not provide sufficient "
                                                       "information to answer this question.");
  if (context == "(none)" || context.empty()) return none;
  std::set<std::string> wanted;
  for (auto& t : tokenize(question, lang)) wanted.insert(std::move(t));
  std::string best;
  std::size_t best_score = 0;
  for (const auto& s : sentences_of(context)) {
    std::size_t score = 0;
    for (const auto& t : tokenize(s, lang)) score += wanted.count(t);
    if (score > best_score) {
      best_score = score;
      best = s;
    }
  }
  return best.empty() ? none : best;
}

ordered_json chat_body(const std::string& content, const std::string& model) {
  ordered_json message{{"role", "assistant"}, {"content", content}};
  ordered_json choice{{"index", 0}, {"message", message}, {"finish_reason", "stop"}};
  char id[32];
  std::snprintf(id, sizeof id, "stub-%016llx",
                static_cast<unsigned long long>(fnv1a(content)));
  return ordered_json{{"id", id},
                      {"object", "chat.completion"},
                      {"model", model},
                      {"choices", ordered_json::array({choice})}};
}

}  // namespace

std::string chat_reply(const std::string& prompt) {
  if (contains(prompt, "Test cases:") && contains(prompt, "Generated Answer:")) {
    return MockJudge().complete(prompt);
  }
  if (contains(prompt, "summarize the key points necessary")) return keypoints_reply(prompt);
  if (contains(prompt, "You are writing one question-answer pair")) return qra_reply(prompt);
  if (contains(prompt, "every sentence that supports the answer")) return references_reply(prompt);
  if (contains(prompt, "\"supplement\"") && contains(prompt, "\"delete\"")) {
    return R"({"supplement": [], "delete": []})";
  }
  if (contains(prompt, "You are filling in the configuration of")) return leaf_value(prompt);
  if (contains(prompt, "The configuration below is the only source of facts")) {
    return document_reply(prompt);
  }
  if (contains(prompt, "Answer the question using only the reference passages")) {
    return eval_reply(prompt);
  }
  return "I cannot help with that request.";
}

std::vector<float> embed_text(const std::string& text, std::size_t dim) {
  std::vector<float> out(dim, 0.0f);
  const auto lang = guess_language(text);
  for (const auto& t : tokenize(text, lang)) out[fnv1a(t) % dim] += 1.0f;
  if (std::all_of(out.begin(), out.end(), [](float v) { return v == 0.0f; })) out[0] = 1.0f;
  return out;
}

HttpReply respond(const std::string& path, const std::string& body) {
  const auto request = json::parse(body, nullptr, false);
  if (request.is_discarded() || !request.is_object()) {
    return {400, R"({"error": {"message": "malformed JSON"}})", {}};
  }
  if (path == "/chat/completions") {
    std::string prompt;
    if (request.contains("messages") && request["messages"].is_array() &&
        !request["messages"].empty()) {
      prompt = request["messages"].back().value("content", "");
    }
    return {200, chat_body(chat_reply(prompt), request.value("model", "stub")).dump(), {}};
  }
  if (path == "/embeddings") {
    ordered_json data = ordered_json::array();
    const auto& input = request["input"];
    std::vector<std::string> texts;
    if (input.is_string()) {
      texts.push_back(input.get<std::string>());
    } else if (input.is_array()) {
      for (const auto& t : input) texts.push_back(t.is_string() ? t.get<std::string>() : "");
    }
    for (std::size_t i = 0; i < texts.size(); ++i) {
      data.push_back(ordered_json{{"object", "embedding"}, {"index", i},
                                  {"embedding", embed_text(texts[i])}});
    }
    return {200,
            ordered_json{{"object", "list"}, {"data", data}, {"model", request.value("model", "stub")}}
                .dump(),
            {}};
  }
  return {404, R"({"error": {"message": "unknown endpoint"}})", {}};
}

HttpReply ScriptedTransport::post(const std::string& path, const std::string& body,
                                  const HttpHeaders&) {
  ++calls_;
  return respond(path, body);
}

struct StubServer::Impl {
  httplib::Server server;
};

StubServer::StubServer(ServerOptions options, int port)
    : impl_(std::make_unique<Impl>()), options_(std::move(options)) {
  auto& server = impl_->server;
  server.new_task_queue = [] { return new httplib::ThreadPool(32); };
  server.Post(".*", [this](const httplib::Request& req, httplib::Response& res) {
    const auto index = requests_.fetch_add(1);
    const auto now = in_flight_.fetch_add(1) + 1;
    auto seen = max_in_flight_.load();
    while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
    }
    if (options_.delay.count() > 0) std::this_thread::sleep_for(options_.delay);
    HttpReply reply;
    if (!options_.required_key.empty() &&
        req.get_header_value("Authorization") != "Bearer " + options_.required_key) {
      reply = {401, R"({"error": {"message": "missing or wrong API key"}})", {}};
    } else if (index < options_.fail_first) {
      reply = {options_.fail_status, R"({"error": {"message": "injected failure"}})", {}};
    } else if (!req.path.starts_with(options_.prefix)) {
      reply = {404, R"({"error": {"message": "unknown endpoint"}})", {}};
    } else {
      reply = respond(req.path.substr(options_.prefix.size()), req.body);
    }
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
    in_flight_.fetch_sub(1);
  });
  port_ = port == 0 ? server.bind_to_any_port("127.0.0.1") : port;
  if (port != 0 && !server.bind_to_port("127.0.0.1", port)) port_ = -1;
  if (port_ <= 0) throw Error("stub server could not bind a port");
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

StubServer::~StubServer() {
  stop();
  if (thread_.joinable()) thread_.join();
}

std::string StubServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_) + options_.prefix;
}

void StubServer::wait() {
  if (thread_.joinable()) thread_.join();
}

void StubServer::stop() { impl_->server.stop(); }

}  // namespace ragscope::stub
