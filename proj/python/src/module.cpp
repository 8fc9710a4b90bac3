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

// Python bindings. Languages are passed as "EN"/"CN" and labels as their
// display names, so callers need no enum imports.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragscope/corpus.hpp"
#include "ragscope/error.hpp"
#include "ragscope/generation_metrics.hpp"
#include "ragscope/harness.hpp"
#include "ragscope/judge.hpp"
#include "ragscope/report.hpp"
#include "ragscope/retrieval.hpp"
#include "ragscope/retrieval_metrics.hpp"
#include "ragscope/stub.hpp"
#include "ragscope/textproc.hpp"

namespace py = pybind11;
using namespace ragscope;

namespace {

using Strings = std::vector<std::string>;
using Pairs = std::vector<std::pair<std::string, std::string>>;

std::vector<GroundTruthReference> to_references(const Pairs& pairs) {
  std::vector<GroundTruthReference> out;
  for (const auto& [doc, text] : pairs) out.push_back({doc, text});
  return out;
}

KeypointLabel parse_label(const std::string& name) {
  for (auto label : {KeypointLabel::Covered, KeypointLabel::Contradicted, KeypointLabel::Untouched}) {
    if (fold_case(name) == fold_case(to_string(label))) return label;
  }
  throw PreconditionError("unknown label " + name);
}

py::dict chunk_dict(const Chunk& c) {
  py::dict d;
  d["id"] = c.id;
  d["document_id"] = c.document_id;
  d["token_begin"] = c.token_begin;
  d["token_end"] = c.token_end;
  d["span"] = py::make_tuple(c.body_span.begin, c.body_span.end);
  d["body"] = c.body;
  d["text"] = c.render();
  return d;
}

std::vector<Chunk> chunk_all(const Pairs& documents, std::size_t chunk_size, Language lang) {
  std::vector<Chunk> chunks;
  for (const auto& [id, text] : documents) {
    Document doc{id, lang, "", {}, text};
    auto part = chunk_document(doc, chunk_size, false);
    chunks.insert(chunks.end(), part.begin(), part.end());
  }
  return chunks;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Retrieval and answer metrics, chunking, BM25 and evaluation runs.";

  static py::exception<Error> error(m, "Error");
  py::register_exception<PreconditionError>(m, "PreconditionError", error.ptr());
  py::register_exception<DatasetError>(m, "DatasetError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<GatewayError>(m, "GatewayError", error.ptr());
  py::register_exception<CompletionParseError>(m, "CompletionParseError", error.ptr());

  m.def("split_sentences", [](const std::string& text, const std::string& lang) {
    Strings out;
    for (const auto& s : split_sentences(text, parse_language(lang))) out.push_back(s.text);
    return out;
  }, py::arg("text"), py::arg("lang") = "EN");
  m.def("tokenize", [](const std::string& text, const std::string& lang) {
    return tokenize(text, parse_language(lang));
  }, py::arg("text"), py::arg("lang") = "EN");
  m.def("count_words", [](const std::string& text, const std::string& lang) {
    return count_words(text, parse_language(lang));
  }, py::arg("text"), py::arg("lang") = "EN");
  m.def("normalize", [](const std::string& text) { return normalize(text); }, py::arg("text"));

  m.def("chunk_document", [](const std::string& doc_id, const std::string& text,
                             std::size_t chunk_size, const std::string& lang, const Pairs& meta) {
    Document doc{doc_id, parse_language(lang), "", meta, text};
    py::list out;
    for (const auto& c : chunk_document(doc, chunk_size, !meta.empty())) out.append(chunk_dict(c));
    return out;
  }, py::arg("doc_id"), py::arg("text"), py::arg("chunk_size") = kDefaultChunkSize,
     py::arg("lang") = "EN", py::arg("meta") = Pairs{});

  m.def("bm25_search", [](const Pairs& documents, const std::string& query, std::size_t k,
                          std::size_t chunk_size, const std::string& lang) {
    const auto language = parse_language(lang);
    const auto index = build_index(chunk_all(documents, chunk_size, language), {});
    std::vector<std::pair<std::string, double>> out;
    for (const auto& hit : retrieve_topk(index, query, k, language).ranked) {
      out.emplace_back(hit.chunk_id, hit.score);
    }
    return out;
  }, "Chunks (id, text) documents, indexes them and returns the top-k (chunk id, score).",
     py::arg("documents"), py::arg("query"), py::arg("k") = kDefaultTopK,
     py::arg("chunk_size") = kDefaultChunkSize, py::arg("lang") = "EN");

  m.def("recall", [](const Pairs& references, const Strings& retrieved, const std::string& lang) {
    return compute_recall(to_references(references), retrieved, parse_language(lang)).value();
  }, py::arg("references"), py::arg("retrieved"), py::arg("lang") = "EN");
  m.def("eir", [](const Pairs& references, const Strings& retrieved, const std::string& lang) {
    return compute_eir(to_references(references), retrieved, parse_language(lang)).value();
  }, py::arg("references"), py::arg("retrieved"), py::arg("lang") = "EN");

  m.def("rouge_l", [](const std::string& candidate, const std::string& reference,
                      const std::string& lang) {
    return rouge_l(candidate, reference, parse_language(lang));
  }, py::arg("candidate"), py::arg("reference"), py::arg("lang") = "EN");
  m.def("bleu", [](const std::string& candidate, const std::string& reference,
                   const std::string& lang) {
    return bleu(candidate, reference, parse_language(lang));
  }, py::arg("candidate"), py::arg("reference"), py::arg("lang") = "EN");

  m.def("keypoint_metrics", [](const Strings& labels) {
    std::vector<KeypointLabel> parsed;
    for (const auto& l : labels) parsed.push_back(parse_label(l));
    const auto t = compute_keypoint_metrics(parsed);
    py::dict d;
    d["completeness"] = t.completeness();
    d["hallucination"] = t.hallucination();
    d["irrelevancy"] = t.irrelevancy();
    return d;
  }, py::arg("labels"));
  m.def("parse_judge_labels", [](const std::string& transcript, std::size_t expected) {
    Strings out;
    for (auto l : parse_judge_labels(transcript, expected)) out.emplace_back(to_string(l));
    return out;
  }, py::arg("transcript"), py::arg("expected"));

  m.def("validate_dataset", [](const std::filesystem::path& path) {
    const auto dataset = load_dataset(path);
    py::list out;
    for (const auto& record : dataset.records()) {
      for (const auto& v : validate_record(record, dataset)) {
        out.append(py::make_tuple(record.id, v.severity == Severity::Error ? "error" : "warning",
                                  v.field, v.message));
      }
    }
    return out;
  }, "Loads a dataset and returns (record id, severity, field, message) tuples.",
     py::arg("path"));

  m.def("evaluate", [](const std::string& config_json, const std::filesystem::path& base_dir,
                       const std::string& format, bool stub) {
    ExperimentSpec spec;
    spec.apply_json(nlohmann::json::parse(config_json), base_dir);
    std::unique_ptr<Gateway> gateway;
    if (stub && spec.needs_gateway()) {
      auto config = spec.gateway;
      config.api_key_env.clear();
      gateway = std::make_unique<Gateway>(config, std::make_shared<stub::ScriptedTransport>());
    }
    EvaluationRun run;
    {
      py::gil_scoped_release release;
      run = run_evaluation(spec, gateway.get());
    }
    return render_report(std::span(&run.report, 1), parse_report_format(format));
  }, "Runs one evaluation from a JSON experiment config and renders the report.",
     py::arg("config_json"), py::arg("base_dir") = ".", py::arg("format") = "json",
     py::arg("stub") = false);
}
