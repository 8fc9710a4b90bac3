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
#include <optional>
#include <string>
#include <vector>

#include "ragscope/corpus.hpp"
#include "ragscope/llm_gateway.hpp"
#include "ragscope/report.hpp"
#include "ragscope/retrieval.hpp"

namespace ragscope {

enum class JudgeKind { Mock, Remote };

std::string_view to_string(JudgeKind kind);
JudgeKind parse_judge_kind(std::string_view text);

/// gpt-4o-mini with the gateway sampling defaults.
ChatRequest default_generator();

struct ExperimentSpec {
  std::filesystem::path dataset_path;
  RetrieverSpec retriever;
  /// Score the dataset's gold answers instead of generating.
  bool oracle_answers = false;
  /// Skip retrieval; every record sees an empty context.
  bool no_retrieval = false;
  ChatRequest generator = default_generator();
  JudgeKind judge = JudgeKind::Mock;
  std::string judge_model = "gpt-4o";
  std::vector<GroupDimension> grouping = {GroupDimension::QuestionType};
  std::uint64_t seed = 0;
  /// Keep at most this many records per question type, drawn with `seed`.
  std::optional<std::size_t> sample_per_type;
  std::size_t jobs = 1;
  /// Abort when more than this fraction of records fail judging.
  double max_judge_failure_rate = 0.2;
  std::optional<std::filesystem::path> template_dir;
  GatewayConfig gateway;

  /// Overlays the fields present in a JSON config onto *this. Relative
  /// paths resolve against `base_dir`.
  void apply_json(const nlohmann::json& json, const std::filesystem::path& base_dir);
  void validate() const;
  /// Whether a run needs a model endpoint.
  bool needs_gateway() const;
};

/// Outcome for one record.
struct RecordResult {
  std::string record_id;
  QuestionType question_type = QuestionType::Factual;
  std::string scenario;
  Language language = Language::EN;
  std::vector<std::string> retrieved_ids;
  std::string answer;
  std::optional<double> recall;
  std::optional<double> eir;
  std::optional<GenMetricTriple> keypoints;
  double rouge_l = 0.0;
  double bleu = 0.0;
  /// Set when judging failed; such records are left out of the averages.
  std::optional<std::string> failure;
};

struct EvaluationRun {
  MetricReport report;
  std::vector<RecordResult> records;
};

/// Records kept by per-type sampling, in dataset order.
std::vector<std::size_t> sample_records(const EvalDataset& dataset, std::size_t per_type,
                                        std::uint64_t seed);

/// Chunks and indexes the corpus (one index per language), then retrieves,
/// answers, judges and scores every record. `gateway` serves generation,
/// embeddings and the remote judge; when null and one is needed, a gateway
/// is built from spec.gateway. Throws Error when more than
/// max_judge_failure_rate of the records fail judging.
EvaluationRun run_evaluation(const ExperimentSpec& spec, const EvalDataset& dataset,
                             Gateway* gateway = nullptr);
EvaluationRun run_evaluation(const ExperimentSpec& spec, Gateway* gateway = nullptr);

struct SweepPoint {
  std::size_t chunk_size = kDefaultChunkSize;
  std::size_t top_k = kDefaultTopK;
  std::optional<RetrieverKind> retriever;

  /// "128-20", or "embedding 128-20" when the retriever is set.
  std::string label() const;
};

/// (128, 20), (256, 10), (512, 5).
std::vector<SweepPoint> default_chunk_grid();
/// The base chunk size with top-k 2, 5 and 8.
std::vector<SweepPoint> topk_grid(std::size_t chunk_size, std::vector<std::size_t> ks = {2, 5, 8});

struct SweepOutcome {
  SweepPoint point;
  std::optional<MetricReport> report;
  std::optional<std::string> error;
};

/// One evaluation per point over a single dataset load. A failing point is
/// recorded in its outcome and the sweep continues.
std::vector<SweepOutcome> run_sweep(const ExperimentSpec& base,
                                    const std::vector<SweepPoint>& grid,
                                    Gateway* gateway = nullptr);

}  // namespace ragscope
