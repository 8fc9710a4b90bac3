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

#include "ragscope/harness.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>

#include "ragscope/error.hpp"
#include "ragscope/generation_metrics.hpp"
#include "ragscope/judge.hpp"
#include "ragscope/parallel.hpp"
#include "ragscope/retrieval_metrics.hpp"
#include "ragscope/rng.hpp"
#include "ragscope/templates.hpp"

namespace ragscope {
namespace {

using nlohmann::json;

std::string group_key(const RecordResult& r, GroupDimension dim) {
  switch (dim) {
    case GroupDimension::QuestionType: return std::string(short_code(r.question_type));
    case GroupDimension::Scenario: return r.scenario;
    case GroupDimension::Language: return std::string(to_string(r.language));
  }
  return "";
}

// Sort rank of a group label within its dimension.
std::pair<int, std::string> group_rank(GroupDimension dim, const std::string& key) {
  if (dim == GroupDimension::QuestionType) {
    if (auto t = question_type_from_code(key)) return {static_cast<int>(*t), key};
  }
  if (dim == GroupDimension::Language) return {key == "EN" ? 0 : 1, key};
  return {0, key};
}

struct Accumulator {
  std::size_t n = 0;
  std::size_t failures = 0;
  std::size_t recall_n = 0, eir_n = 0;
  double recall = 0, eir = 0, completeness = 0, hallucination = 0, irrelevancy = 0, rouge = 0,
         bleu = 0;

  void add(const RecordResult& r) {
    if (r.failure) {
      ++failures;
      return;
    }
    ++n;
    if (r.recall) {
      recall += *r.recall;
      ++recall_n;
    }
    if (r.eir) {
      eir += *r.eir;
      ++eir_n;
    }
    completeness += r.keypoints->completeness();
    hallucination += r.keypoints->hallucination();
    irrelevancy += r.keypoints->irrelevancy();
    rouge += r.rouge_l;
    bleu += r.bleu;
  }

  MetricRow row(std::string group) const {
    MetricRow out;
    out.group = std::move(group);
    out.n = n;
    out.failures = failures;
    if (recall_n > 0) out.recall = recall / recall_n;
    if (eir_n > 0) out.eir = eir / eir_n;
    if (n > 0) {
      out.completeness = completeness / n;
      out.hallucination = hallucination / n;
      out.irrelevancy = irrelevancy / n;
      out.rouge_l = rouge / n;
      out.bleu = bleu / n;
    }
    return out;
  }
};

MetricReport aggregate(const std::vector<RecordResult>& results,
                       const std::vector<GroupDimension>& grouping) {
  MetricReport report;
  Accumulator all;
  for (const auto& r : results) all.add(r);
  for (auto dim : grouping) {
    std::map<std::pair<int, std::string>, Accumulator> groups;
    for (const auto& r : results) groups[group_rank(dim, group_key(r, dim))].add(r);
    DimensionTable table;
    table.dimension = dim;
    for (const auto& [rank, acc] : groups) table.rows.push_back(acc.row(rank.second));
    table.rows.push_back(all.row(std::string(kAverageGroup)));
    report.tables.push_back(std::move(table));
  }
  return report;
}

std::string render_context(const Index* index, const RetrievalResult& retrieved) {
  if (index == nullptr || retrieved.ranked.empty()) return "(none)";
  std::string out;
  for (std::size_t i = 0; i < retrieved.ranked.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += "[" + std::to_string(i + 1) + "] " +
           index->find_chunk(retrieved.ranked[i].chunk_id)->render();
  }
  return out;
}

}  // namespace

ChatRequest default_generator() {
  ChatRequest request;
  request.model = "gpt-4o-mini";
  return request;
}

std::string_view to_string(JudgeKind kind) {
  return kind == JudgeKind::Mock ? "mock" : "remote";
}

JudgeKind parse_judge_kind(std::string_view text) {
  if (text == "mock") return JudgeKind::Mock;
  if (text == "remote") return JudgeKind::Remote;
  throw PreconditionError("unknown judge " + std::string(text) + " (expected mock or remote)");
}

void ExperimentSpec::apply_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("experiment config must be a JSON object");
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  if (doc.contains("dataset")) dataset_path = resolve(doc["dataset"]);
  if (doc.contains("retriever")) {
    const auto& r = doc["retriever"];
    if (r.contains("kind")) retriever.kind = parse_retriever_kind(r["kind"].get<std::string>());
    retriever.chunk_size = r.value("chunk_size", retriever.chunk_size);
    retriever.top_k = r.value("top_k", retriever.top_k);
    retriever.embedding_model = r.value("embedding_model", retriever.embedding_model);
  }
  if (doc.contains("generator")) {
    const auto& g = doc["generator"];
    generator.model = g.value("model", generator.model);
    generator.temperature = g.value("temperature", generator.temperature);
    generator.top_p = g.value("top_p", generator.top_p);
    generator.max_new_tokens = g.value("max_new_tokens", generator.max_new_tokens);
  }
  oracle_answers = doc.value("oracle_answers", oracle_answers);
  no_retrieval = doc.value("no_retrieval", no_retrieval);
  if (doc.contains("judge")) {
    const auto& j = doc["judge"];
    if (j.contains("kind")) judge = parse_judge_kind(j["kind"].get<std::string>());
    judge_model = j.value("model", judge_model);
  }
  if (doc.contains("group_by")) {
    grouping.clear();
    for (const auto& g : doc["group_by"]) grouping.push_back(parse_group_dimension(g.get<std::string>()));
  }
  seed = doc.value("seed", seed);
  if (doc.contains("sample_per_type")) sample_per_type = doc["sample_per_type"].get<std::size_t>();
  jobs = doc.value("jobs", jobs);
  max_judge_failure_rate = doc.value("max_judge_failure_rate", max_judge_failure_rate);
  if (doc.contains("templates")) template_dir = resolve(doc["templates"]);
  if (doc.contains("gateway")) {
    const auto& g = doc["gateway"];
    gateway.base_url = g.value("base_url", gateway.base_url);
    gateway.api_key_env = g.value("api_key_env", gateway.api_key_env);
    gateway.max_in_flight = g.value("max_in_flight", gateway.max_in_flight);
    if (g.contains("cache_dir")) gateway.cache_dir = resolve(g["cache_dir"]);
  }
}

void ExperimentSpec::validate() const {
  retriever.validate();
  if (grouping.empty()) throw PreconditionError("at least one grouping dimension is required");
  if (max_judge_failure_rate < 0 || max_judge_failure_rate > 1) {
    throw PreconditionError("max_judge_failure_rate must be in [0, 1]");
  }
  if (!oracle_answers) generator.validate();
}

bool ExperimentSpec::needs_gateway() const {
  return !oracle_answers || judge == JudgeKind::Remote ||
         (!no_retrieval && retriever.kind == RetrieverKind::Embedding);
}

std::vector<std::size_t> sample_records(const EvalDataset& dataset, std::size_t per_type,
                                        std::uint64_t seed) {
  std::map<QuestionType, std::vector<std::size_t>> by_type;
  for (std::size_t i = 0; i < dataset.records().size(); ++i) {
    by_type[dataset.records()[i].question_type].push_back(i);
  }
  std::mt19937_64 rng(splitmix64(seed));
  std::vector<std::size_t> keep;
  for (auto& [type, indices] : by_type) {
    const std::size_t take = std::min(per_type, indices.size());
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < take; ++i) {
      const auto j = static_cast<std::size_t>(
          draw_int(rng, static_cast<std::int64_t>(i), static_cast<std::int64_t>(indices.size()) - 1));
      std::swap(indices[i], indices[j]);
    }
    keep.insert(keep.end(), indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

EvaluationRun run_evaluation(const ExperimentSpec& spec, const EvalDataset& dataset,
                             Gateway* gateway) {
  spec.validate();
  if (dataset.n_records() == 0) throw DatasetError("dataset has no records");
  std::unique_ptr<Gateway> owned;
  if (spec.needs_gateway() && gateway == nullptr) {
    owned = std::make_unique<Gateway>(spec.gateway);
    gateway = owned.get();
  }

  std::vector<std::size_t> selected(dataset.n_records());
  std::iota(selected.begin(), selected.end(), 0);
  if (spec.sample_per_type) selected = sample_records(dataset, *spec.sample_per_type, spec.seed);

  // One index per language.
  std::unique_ptr<GatewayEmbedder> embedder;
  if (spec.retriever.kind == RetrieverKind::Embedding && !spec.no_retrieval) {
    embedder = std::make_unique<GatewayEmbedder>(*gateway, spec.retriever.embedding_model);
  }
  std::map<Language, Index> indexes;
  if (!spec.no_retrieval) {
    std::map<Language, std::vector<Chunk>> chunks;
    for (const auto& doc : dataset.documents()) {
      auto doc_chunks = chunk_document(doc, spec.retriever.chunk_size, true);
      auto& bucket = chunks[doc.language];
      bucket.insert(bucket.end(), std::make_move_iterator(doc_chunks.begin()),
                    std::make_move_iterator(doc_chunks.end()));
    }
    for (auto& [lang, list] : chunks) {
      indexes.emplace(lang, build_index(std::move(list), spec.retriever, embedder.get()));
    }
  }

  const auto answer_template = load_template(spec.template_dir, kAnswerTemplate);
  const auto judge_template = load_template(spec.template_dir, kJudgeTemplate);
  MockJudge mock_judge;
  std::unique_ptr<GatewayJudge> remote_judge;
  if (spec.judge == JudgeKind::Remote) {
    ChatRequest base;
    base.model = spec.judge_model;
    base.temperature = 0.0;
    remote_judge = std::make_unique<GatewayJudge>(*gateway, base);
  }
  JudgeBackend& judge = remote_judge ? static_cast<JudgeBackend&>(*remote_judge) : mock_judge;

  EvaluationRun run;
  run.records.resize(selected.size());
  parallel_for(selected.size(), spec.jobs, [&](std::size_t slot) {
    const auto& record = dataset.records()[selected[slot]];
    RecordResult& out = run.records[slot];
    out.record_id = record.id;
    out.question_type = record.question_type;
    out.language = record.language;
    const Document* first_doc =
        record.document_ids.empty() ? nullptr : dataset.find_document(record.document_ids.front());
    out.scenario = first_doc ? first_doc->scenario : "";

    RetrievalResult retrieved{record.id, {}};
    const Index* index = nullptr;
    if (auto it = indexes.find(record.language); it != indexes.end()) {
      index = &it->second;
      retrieved = retrieve_topk(*index, record.question, spec.retriever.top_k, record.language);
    }
    std::vector<std::string> texts;
    for (const auto& scored : retrieved.ranked) {
      out.retrieved_ids.push_back(scored.chunk_id);
      texts.push_back(index->find_chunk(scored.chunk_id)->body);
    }
    if (!record.references.empty()) {
      out.recall = compute_recall(record.references, texts, record.language).value();
    }
    if (!texts.empty()) {
      try {
        out.eir = compute_eir(record.references, texts, record.language).value();
      } catch (const PreconditionError&) {
        // Retrieved passages without a single word leave EIR undefined.
      }
    }

    if (spec.oracle_answers) {
      out.answer = record.answer;
    } else {
      ChatRequest request = spec.generator;
      request.user = answer_template.render(
          {{"context", render_context(index, retrieved)}, {"question", record.question}});
      out.answer = gateway->chat_complete(request);
    }
    out.rouge_l = rouge_l(out.answer, record.answer, record.language);
    out.bleu = bleu(out.answer, record.answer, record.language);

    try {
      const auto verdicts =
          classify_keypoints(record.question, out.answer, record.keypoints, judge, judge_template);
      out.keypoints = compute_keypoint_metrics(verdicts);
    } catch (const CompletionParseError& e) {
      out.failure = e.what();
    } catch (const GatewayError& e) {
      out.failure = e.what();
    } catch (const PreconditionError& e) {
      out.failure = e.what();
    }
  });

  std::size_t failures = 0;
  for (const auto& r : run.records) failures += r.failure ? 1 : 0;
  if (!run.records.empty() &&
      static_cast<double>(failures) / static_cast<double>(run.records.size()) >
          spec.max_judge_failure_rate) {
    std::string first;
    for (const auto& r : run.records) {
      if (r.failure) {
        first = r.record_id + ": " + *r.failure;
        break;
      }
    }
    throw Error("judge failed on " + std::to_string(failures) + " of " +
                std::to_string(run.records.size()) + " records (limit " +
                format_percent(spec.max_judge_failure_rate) + "%); first failure " + first);
  }
  run.report = aggregate(run.records, spec.grouping);
  return run;
}

EvaluationRun run_evaluation(const ExperimentSpec& spec, Gateway* gateway) {
  const auto dataset = load_dataset(spec.dataset_path);
  return run_evaluation(spec, dataset, gateway);
}

std::string SweepPoint::label() const {
  std::string out = std::to_string(chunk_size) + "-" + std::to_string(top_k);
  if (retriever) out = std::string(to_string(*retriever)) + " " + out;
  return out;
}

std::vector<SweepPoint> default_chunk_grid() {
  return {{128, 20, std::nullopt}, {256, 10, std::nullopt}, {512, 5, std::nullopt}};
}

std::vector<SweepPoint> topk_grid(std::size_t chunk_size, std::vector<std::size_t> ks) {
  std::vector<SweepPoint> out;
  for (auto k : ks) out.push_back({chunk_size, k, std::nullopt});
  return out;
}

std::vector<SweepOutcome> run_sweep(const ExperimentSpec& base,
                                    const std::vector<SweepPoint>& grid, Gateway* gateway) {
  if (grid.empty()) throw PreconditionError("empty sweep grid");
  const auto dataset = load_dataset(base.dataset_path);
  std::unique_ptr<Gateway> owned;
  std::vector<SweepOutcome> out;
  for (const auto& point : grid) {
    SweepOutcome outcome{point, std::nullopt, std::nullopt};
    ExperimentSpec spec = base;
    spec.retriever.chunk_size = point.chunk_size;
    spec.retriever.top_k = point.top_k;
    if (point.retriever) spec.retriever.kind = *point.retriever;
    try {
      if (spec.needs_gateway() && gateway == nullptr && !owned) {
        owned = std::make_unique<Gateway>(base.gateway);
      }
      auto run = run_evaluation(spec, dataset, gateway ? gateway : owned.get());
      run.report.setting = point.label();
      outcome.report = std::move(run.report);
    } catch (const Error& e) {
      outcome.error = e.what();
    }
    out.push_back(std::move(outcome));
  }
  return out;
}

}  // namespace ragscope
