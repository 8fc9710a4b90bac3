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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "ragscope/corpus.hpp"
#include "ragscope/error.hpp"
#include "ragscope/genpipeline.hpp"
#include "ragscope/harness.hpp"
#include "ragscope/llm_gateway.hpp"
#include "ragscope/report.hpp"
#include "ragscope/stub.hpp"

namespace {

using namespace ragscope;

struct GatewayFlags {
  std::string base_url;
  std::string cache_dir;
  std::string api_key_env;
  std::size_t max_in_flight = 0;
  bool stub = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--base-url", base_url, "OpenAI-compatible endpoint, e.g. http://host/v1");
    cmd->add_option("--cache-dir", cache_dir, "Request cache directory");
    cmd->add_option("--api-key-env", api_key_env, "Environment variable holding the API key");
    cmd->add_option("--max-in-flight", max_in_flight, "Concurrent request limit");
    cmd->add_flag("--stub", stub, "Answer model calls with the built-in deterministic stub");
  }

  void apply(GatewayConfig& config) const {
    if (!base_url.empty()) config.base_url = base_url;
    if (!cache_dir.empty()) config.cache_dir = cache_dir;
    if (!api_key_env.empty()) config.api_key_env = api_key_env;
    if (max_in_flight > 0) config.max_in_flight = max_in_flight;
  }

  std::unique_ptr<Gateway> make(GatewayConfig config) const {
    apply(config);
    if (stub) {
      config.api_key_env.clear();
      return std::make_unique<Gateway>(config, std::make_shared<stub::ScriptedTransport>());
    }
    return std::make_unique<Gateway>(config);
  }
};

struct EvalFlags {
  std::string config;
  std::string dataset;
  std::size_t chunk_size = 0;
  std::size_t top_k = 0;
  std::string retriever;
  std::string judge;
  std::string judge_model;
  std::string model;
  bool oracle_answers = false;
  bool no_retrieval = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> sample_per_type;
  std::vector<std::string> group_by;
  std::size_t jobs = 0;
  std::string templates;
  std::string out;
  std::string format;
  GatewayFlags gateway;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config, "Experiment config (JSON); flags override it");
    cmd->add_option("--dataset", dataset, "Dataset JSONL");
    cmd->add_option("--chunk-size", chunk_size, "Tokens per chunk (default 512)");
    cmd->add_option("--top-k", top_k, "Chunks retrieved per question (default 5)");
    cmd->add_option("--retriever", retriever, "bm25 or embedding")
        ->check(CLI::IsMember({"bm25", "embedding"}));
    cmd->add_option("--judge", judge, "mock or remote")->check(CLI::IsMember({"mock", "remote"}));
    cmd->add_option("--judge-model", judge_model, "Model for the remote judge");
    cmd->add_option("--model", model, "Answer generation model");
    cmd->add_flag("--oracle-answers", oracle_answers, "Score the gold answers");
    cmd->add_flag("--no-retrieval", no_retrieval, "Answer with an empty context");
    cmd->add_option("--seed", seed, "Sampling seed");
    cmd->add_option("--sample-per-type", sample_per_type, "Records kept per question type");
    cmd->add_option("--group-by", group_by, "question_type, scenario, language")
        ->delimiter(',');
    cmd->add_option("--jobs", jobs, "Worker threads");
    cmd->add_option("--templates", templates, "Prompt template directory");
    cmd->add_option("--out", out, "Report file (stdout when omitted)");
    cmd->add_option("--format", format, "csv, markdown or json (default from --out)")
        ->check(CLI::IsMember({"csv", "markdown", "md", "json"}));
    gateway.add_to(cmd);
  }

  ExperimentSpec spec() const {
    ExperimentSpec spec;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw ConfigError("cannot read config " + config);
      const auto doc = nlohmann::json::parse(in, nullptr, false);
      if (doc.is_discarded()) throw ConfigError("malformed config " + config);
      spec.apply_json(doc, std::filesystem::path(config).parent_path());
    }
    if (!dataset.empty()) spec.dataset_path = dataset;
    if (chunk_size > 0) spec.retriever.chunk_size = chunk_size;
    if (top_k > 0) spec.retriever.top_k = top_k;
    if (!retriever.empty()) spec.retriever.kind = parse_retriever_kind(retriever);
    if (!judge.empty()) spec.judge = parse_judge_kind(judge);
    if (!judge_model.empty()) spec.judge_model = judge_model;
    if (!model.empty()) spec.generator.model = model;
    if (oracle_answers) spec.oracle_answers = true;
    if (no_retrieval) spec.no_retrieval = true;
    if (seed) spec.seed = *seed;
    if (sample_per_type) spec.sample_per_type = *sample_per_type;
    if (!group_by.empty()) {
      spec.grouping.clear();
      for (const auto& g : group_by) spec.grouping.push_back(parse_group_dimension(g));
    }
    if (jobs > 0) spec.jobs = jobs;
    if (!templates.empty()) spec.template_dir = templates;
    gateway.apply(spec.gateway);
    if (spec.dataset_path.empty()) throw ConfigError("no dataset given (--dataset or config)");
    return spec;
  }

  ReportFormat report_format() const { return resolve_format(format, out); }

  static ReportFormat resolve_format(const std::string& format, const std::string& out) {
    if (!format.empty()) return parse_report_format(format);
    const auto ext = std::filesystem::path(out).extension().string();
    if (ext == ".csv") return ReportFormat::Csv;
    if (ext == ".json") return ReportFormat::Json;
    return ReportFormat::Markdown;
  }
};

void emit(std::span<const MetricReport> reports, ReportFormat format, const std::string& out) {
  if (out.empty()) {
    emit_report(reports, format, std::cout);
  } else {
    write_report(reports, format, out);
  }
}

std::vector<SweepPoint> parse_grid(const std::vector<std::string>& items) {
  std::vector<SweepPoint> out;
  for (const auto& item : items) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) throw PreconditionError("grid point must be CHUNK-TOPK: " + item);
    try {
      out.push_back({std::stoul(item.substr(0, dash)), std::stoul(item.substr(dash + 1)),
                     std::nullopt});
    } catch (const std::logic_error&) {
      throw PreconditionError("grid point must be CHUNK-TOPK: " + item);
    }
  }
  return out;
}

int run_generate(const std::string& config, const std::string& out, std::optional<std::uint64_t> seed,
                 std::size_t jobs, const std::string& templates, const GatewayFlags& gateway_flags,
                 bool quiet) {
  auto spec = PipelineSpec::load(config);
  if (seed) spec.seed = *seed;
  if (!templates.empty()) spec.options.template_dir = templates;
  auto gateway = gateway_flags.make(spec.gateway);
  const auto result = run_pipeline(spec, *gateway, jobs);
  if (!quiet) {
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  }
  for (const auto& f : result.failures) std::cerr << "dropped: " << f << '\n';
  if (out.empty()) {
    write_dataset(result.dataset, std::cout);
  } else {
    save_dataset(result.dataset, out);
  }
  const auto stats = gateway->stats();
  std::cerr << result.dataset.documents().size() << " documents, " << result.dataset.n_records()
            << " records; " << stats.network_requests << " requests, " << stats.cache_hits
            << " cache hits\n";
  return 0;
}

int run_validate(const std::string& dataset_path) {
  const auto dataset = load_dataset(dataset_path);
  std::size_t errors = 0, warnings = 0;
  for (const auto& record : dataset.records()) {
    for (const auto& v : validate_record(record, dataset)) {
      const bool is_error = v.severity == Severity::Error;
      (is_error ? errors : warnings) += 1;
      std::cout << (is_error ? "error " : "warning ") << record.id << ' ' << v.field << ": "
                << v.message << '\n';
    }
  }
  std::cout << dataset.documents().size() << " documents, " << dataset.n_records()
            << " records, " << errors << " errors, " << warnings << " warnings\n";
  return errors == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario-specific RAG evaluation: dataset generation, retrieval and answer "
               "metrics, sweeps and reports."};
  app.require_subcommand(1);

  auto* generate = app.add_subcommand("generate", "Generate a dataset from a pipeline config");
  std::string gen_config, gen_out, gen_templates;
  std::optional<std::uint64_t> gen_seed;
  std::size_t gen_jobs = 4;
  bool gen_quiet = false;
  GatewayFlags gen_gateway;
  generate->add_option("--config", gen_config, "Pipeline config (JSON)")->required();
  generate->add_option("--out", gen_out, "Dataset JSONL (stdout when omitted)");
  generate->add_option("--seed", gen_seed, "Override the config seed");
  generate->add_option("--jobs", gen_jobs, "Worker threads");
  generate->add_option("--templates", gen_templates, "Prompt template directory");
  generate->add_flag("--quiet", gen_quiet, "Do not print warnings");
  gen_gateway.add_to(generate);

  auto* eval = app.add_subcommand("eval", "Evaluate a RAG pipeline over a dataset");
  EvalFlags eval_flags;
  eval_flags.add_to(eval);

  auto* sweep = app.add_subcommand("sweep", "Evaluate over a grid of retrieval settings");
  EvalFlags sweep_flags;
  std::vector<std::string> grid;
  std::vector<std::size_t> topk_values;
  std::vector<std::string> retrievers;
  sweep_flags.add_to(sweep);
  sweep->add_option("--grid", grid, "CHUNK-TOPK points (default 128-20,256-10,512-5)")
      ->delimiter(',');
  sweep->add_option("--top-k-grid", topk_values, "Top-k values at a fixed chunk size, e.g. 2,5,8")
      ->delimiter(',');
  sweep->add_option("--retrievers", retrievers, "Retriever kinds to cross with the grid")
      ->delimiter(',');

  auto* report = app.add_subcommand("report", "Re-render a JSON report");
  std::string report_in, report_out, report_format;
  report->add_option("--in", report_in, "JSON report")->required();
  report->add_option("--out", report_out, "Output file (stdout when omitted)");
  report->add_option("--format", report_format, "csv, markdown or json")
      ->check(CLI::IsMember({"csv", "markdown", "md", "json"}));

  auto* validate = app.add_subcommand("validate", "Check a dataset file");
  std::string validate_dataset;
  validate->add_option("--dataset", validate_dataset, "Dataset JSONL")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      return run_generate(gen_config, gen_out, gen_seed, gen_jobs, gen_templates, gen_gateway,
                          gen_quiet);
    }
    if (*eval) {
      const auto spec = eval_flags.spec();
      std::unique_ptr<Gateway> gateway;
      if (spec.needs_gateway()) gateway = eval_flags.gateway.make(spec.gateway);
      const auto run = run_evaluation(spec, gateway.get());
      const std::vector<MetricReport> reports{run.report};
      emit(reports, eval_flags.report_format(), eval_flags.out);
      return 0;
    }
    if (*sweep) {
      const auto spec = sweep_flags.spec();
      std::vector<SweepPoint> points;
      if (!topk_values.empty()) {
        points = topk_grid(spec.retriever.chunk_size, topk_values);
      } else {
        points = grid.empty() ? default_chunk_grid() : parse_grid(grid);
      }
      if (!retrievers.empty()) {
        std::vector<SweepPoint> crossed;
        for (const auto& kind : retrievers) {
          for (auto p : points) {
            p.retriever = parse_retriever_kind(kind);
            crossed.push_back(p);
          }
        }
        points = std::move(crossed);
      }
      std::unique_ptr<Gateway> gateway;
      bool needs = spec.needs_gateway();
      for (const auto& p : points) {
        needs = needs || (p.retriever == RetrieverKind::Embedding && !spec.no_retrieval);
      }
      if (needs) gateway = sweep_flags.gateway.make(spec.gateway);
      const auto outcomes = run_sweep(spec, points, gateway.get());
      std::vector<MetricReport> reports;
      int status = 0;
      for (const auto& o : outcomes) {
        if (o.report) {
          reports.push_back(*o.report);
        } else {
          std::cerr << "sweep point " << o.point.label() << " failed: " << *o.error << '\n';
          status = 1;
        }
      }
      if (!reports.empty()) emit(reports, sweep_flags.report_format(), sweep_flags.out);
      return reports.empty() ? 1 : status;
    }
    if (*report) {
      std::ifstream in(report_in);
      if (!in) throw Error("cannot read " + report_in);
      const auto doc = nlohmann::json::parse(in, nullptr, false);
      if (doc.is_discarded()) throw Error("malformed report " + report_in);
      const auto reports = parse_report_json(doc);
      emit(reports, EvalFlags::resolve_format(report_format, report_out), report_out);
      return 0;
    }
    if (*validate) return run_validate(validate_dataset);
  } catch (const DatasetError& e) {
    std::cerr << "dataset error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
