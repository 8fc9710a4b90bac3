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

// Judge protocol, keypoint and overlap metrics, report rendering.

#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ragscope/error.hpp"
#include "ragscope/generation_metrics.hpp"
#include "ragscope/judge.hpp"
#include "ragscope/report.hpp"

namespace ragscope {
namespace {

using Strings = std::vector<std::string>;
using L = KeypointLabel;

// ---------------------------------------------------------------------------
// judge label parsing

JudgeParseError expect_parse_error(const std::string& transcript, std::size_t expected) {
  try {
    parse_judge_labels(transcript, expected);
  } catch (const JudgeParseError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a JudgeParseError for: " << transcript;
  return JudgeParseError(JudgeParseError::Kind::CountMismatch, "", "");
}

TEST(JudgeParser, ScansTokensInOrder) {
  const std::string t =
      "Key Point 1: ... Conclusion: [[[Relevant]]]\nKey Point 2: [[[Relevant]]]\n"
      "Key Point 3: Conclusion: [[[Wrong]]]";
  EXPECT_EQ(parse_judge_labels(t, 3), (std::vector<L>{L::Covered, L::Covered, L::Contradicted}));
  EXPECT_EQ(parse_judge_labels("[[[Irrelevant]]]", 1), std::vector<L>{L::Untouched});
  EXPECT_EQ(parse_judge_labels("x [[[[Wrong]]]] y", 1), std::vector<L>{L::Contradicted});
}

TEST(JudgeParser, CountMismatch) {
  const auto e = expect_parse_error("[[[Relevant]]] and [[[Wrong]]]", 3);
  EXPECT_EQ(e.kind(), JudgeParseError::Kind::CountMismatch);
  EXPECT_STREQ(e.what(), "count mismatch (found 2, expected 3)");
  EXPECT_EQ(e.found(), 2u);
  EXPECT_EQ(e.expected(), 3u);
  EXPECT_EQ(expect_parse_error("[[[Relevant]]] [[[Relevant]]]", 1).found(), 2u);
  EXPECT_EQ(expect_parse_error("no conclusions at all", 2).kind(),
            JudgeParseError::Kind::CountMismatch);
}

TEST(JudgeParser, UnknownLabel) {
  const auto e = expect_parse_error("[[[Relevant]]] [[[Maybe]]] [[[Wrong]]]", 3);
  EXPECT_EQ(e.kind(), JudgeParseError::Kind::UnknownLabel);
  EXPECT_NE(std::string(e.what()).find("unknown label"), std::string::npos);
  EXPECT_EQ(e.transcript(), "[[[Relevant]]] [[[Maybe]]] [[[Wrong]]]");
}

TEST(JudgeParser, RejectsZeroExpected) {
  EXPECT_THROW(parse_judge_labels("[[[Relevant]]]", 0), PreconditionError);
}

TEST(JudgeParser, TokensMapBijectively) {
  for (auto label : {L::Covered, L::Contradicted, L::Untouched}) {
    EXPECT_EQ(parse_judge_labels(std::string(judge_token(label)), 1), std::vector<L>{label});
  }
  EXPECT_EQ(judge_token(L::Covered), "[[[Relevant]]]");
  EXPECT_EQ(judge_token(L::Contradicted), "[[[Wrong]]]");
  EXPECT_EQ(judge_token(L::Untouched), "[[[Irrelevant]]]");
}

TEST(JudgeParser, IsTotalOnNoisyTranscripts) {
  const Strings pieces = {"[[[Relevant]]]", "[[[Wrong]]]", "[[[Irrelevant]]]", "[[[Maybe]]]",
                          "[[Relevant]]",   "[[[",         "]]]",              "[",
                          "text ",          "\n",          "结论：",           "[[[[Wrong]]]"};
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string t;
    for (std::size_t i = 0, n = rng() % 10; i < n; ++i) t += pieces[rng() % pieces.size()];
    const std::size_t expected = 1 + rng() % 5;
    try {
      EXPECT_EQ(parse_judge_labels(t, expected).size(), expected) << t;
    } catch (const JudgeParseError&) {
    }
  }
}

// ---------------------------------------------------------------------------
// classify_keypoints

class ScriptedBackend : public JudgeBackend {
 public:
  explicit ScriptedBackend(std::deque<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const std::string& prompt) override {
    prompts.push_back(prompt);
    auto reply = replies_.front();
    if (replies_.size() > 1) replies_.pop_front();
    return reply;
  }
  Strings prompts;

 private:
  std::deque<std::string> replies_;
};

const Strings kPoints = {"Revenue was 5 million", "The board approved the merger",
                         "The CEO resigned"};

TEST(Judge, MapsConclusionsPositionally) {
  ScriptedBackend backend({"1: [[[Relevant]]]\n2: [[[Wrong]]]\n3: [[[Irrelevant]]]"});
  const auto v = classify_keypoints("Q?", "A.", kPoints, backend);
  EXPECT_EQ(v.labels, (std::vector<L>{L::Covered, L::Contradicted, L::Untouched}));
  ASSERT_EQ(backend.prompts.size(), 1u);
  const auto& prompt = backend.prompts[0];
  EXPECT_NE(prompt.find("Question: Q?"), std::string::npos);
  EXPECT_NE(prompt.find("Generated Answer: A."), std::string::npos);
  EXPECT_NE(prompt.find("Here are 3 key points\n1. Revenue was 5 million\n2. The board"),
            std::string::npos);
}

TEST(Judge, EmptyKeypointSet) {
  ScriptedBackend backend({"[[[Relevant]]]"});
  try {
    classify_keypoints("Q?", "A.", Strings{}, backend);
    FAIL() << "expected a PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_STREQ(e.what(), "empty keypoint set");
  }
  EXPECT_TRUE(backend.prompts.empty());
}

TEST(Judge, RetriesOnceWithAReminder) {
  ScriptedBackend backend({"[[[Relevant]]]", "[[[Relevant]]] [[[Relevant]]] [[[Wrong]]]"});
  const auto v = classify_keypoints("Q?", "A.", kPoints, backend);
  EXPECT_EQ(v.labels, (std::vector<L>{L::Covered, L::Covered, L::Contradicted}));
  ASSERT_EQ(backend.prompts.size(), 2u);
  EXPECT_EQ(backend.prompts[1].rfind(backend.prompts[0], 0), 0u);
  EXPECT_NE(backend.prompts[1].find("Format reminder"), std::string::npos);
}

TEST(Judge, PersistentParseFailureCarriesTheTranscript) {
  ScriptedBackend backend({"first try [[[Relevant]]]", "second try [[[Unsure]]]"});
  try {
    classify_keypoints("Q?", "A.", kPoints, backend);
    FAIL() << "expected a JudgeParseError";
  } catch (const JudgeParseError& e) {
    EXPECT_EQ(e.kind(), JudgeParseError::Kind::UnknownLabel);
    EXPECT_NE(e.transcript().find("first try"), std::string::npos);
    EXPECT_NE(e.transcript().find("second try"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("after retry"), std::string::npos);
  }
  EXPECT_EQ(backend.prompts.size(), 2u);
}

TEST(MockJudge, SubstringAndNegationRule) {
  MockJudge judge;
  const Strings points = {"Revenue was 5 million", "approved by the board", "The CEO resigned"};
  const std::string answer = "Revenue was 5 million. The merger was not approved by the board.";
  const auto v = classify_keypoints("Q?", answer, points, judge);
  EXPECT_EQ(v.labels, (std::vector<L>{L::Covered, L::Contradicted, L::Untouched}));
  EXPECT_EQ(classify_keypoints("Q?", answer, points, judge).raw_transcript, v.raw_transcript);
  EXPECT_EQ(MockJudge::classify("患者没有发热。", "发热"), L::Contradicted);
  EXPECT_EQ(MockJudge::classify("The   cat SAT on the mat.", "the cat sat."), L::Covered);
  EXPECT_EQ(MockJudge::classify("", "anything"), L::Untouched);
}

// ---------------------------------------------------------------------------
// keypoint metrics

TEST(KeypointMetrics, Examples) {
  auto m = compute_keypoint_metrics(std::vector<L>{L::Covered, L::Covered, L::Covered});
  EXPECT_EQ(m.completeness(), 1.0);
  EXPECT_EQ(m.hallucination(), 0.0);
  EXPECT_EQ(m.irrelevancy(), 0.0);
  m = compute_keypoint_metrics(std::vector<L>{L::Covered, L::Contradicted, L::Untouched});
  EXPECT_DOUBLE_EQ(m.completeness(), 1.0 / 3);
  EXPECT_DOUBLE_EQ(m.hallucination(), 1.0 / 3);
  EXPECT_DOUBLE_EQ(m.irrelevancy(), 1.0 / 3);
  m = compute_keypoint_metrics(
      std::vector<L>{L::Covered, L::Covered, L::Covered, L::Contradicted, L::Untouched});
  EXPECT_DOUBLE_EQ(m.completeness(), 0.6);
  EXPECT_DOUBLE_EQ(m.hallucination(), 0.2);
  EXPECT_DOUBLE_EQ(m.irrelevancy(), 0.2);
  EXPECT_THROW(compute_keypoint_metrics(std::vector<L>{}), PreconditionError);
}

TEST(KeypointMetrics, FlippingUntouchedToCoveredAddsOneOverK) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<L> labels(1 + rng() % 6);
    for (auto& l : labels) l = static_cast<L>(rng() % 3);
    const auto before = compute_keypoint_metrics(labels);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != L::Untouched) continue;
      auto flipped = labels;
      flipped[i] = L::Covered;
      const auto after = compute_keypoint_metrics(flipped);
      EXPECT_EQ(after.covered, before.covered + 1);
      EXPECT_EQ(after.contradicted, before.contradicted);
      EXPECT_NEAR(after.completeness() - before.completeness(), 1.0 / labels.size(), 1e-12);
    }
  }
}

// ---------------------------------------------------------------------------
// overlap metrics

TEST(RougeL, Examples) {
  EXPECT_EQ(rouge_l("the cat sat", "the cat sat", Language::EN), 1.0);
  EXPECT_NEAR(rouge_l("the cat", "the cat sat", Language::EN), 0.8, 1e-12);
  EXPECT_EQ(rouge_l("", "x", Language::EN), 0.0);
  EXPECT_EQ(rouge_l("x", "", Language::EN), 0.0);
  EXPECT_NEAR(rouge_l("猫坐着", "猫坐", Language::CN), 0.8, 1e-12);
}

TEST(RougeL, MatchesTableOracleOnShortSequences) {
  std::vector<Strings> all = {{}};
  for (std::size_t len = 1; len <= 5; ++len) {
    const auto prev = all;
    for (const auto& s : prev) {
      if (s.size() != len - 1) continue;
      for (const char* sym : {"a", "b", "c"}) {
        auto t = s;
        t.push_back(sym);
        all.push_back(t);
      }
    }
  }
  for (const auto& a : all) {
    for (const auto& b : all) {
      ASSERT_NEAR(rouge_l_tokens(a, b), oracle::rouge_l(a, b), 1e-9);
    }
  }
}

TEST(Bleu, Examples) {
  EXPECT_NEAR(bleu("one two three four five six", "one two three four five six", Language::EN),
              1.0, 1e-12);
  const double partial = bleu("the quick fox jumped", "the lazy dog slept", Language::EN);
  EXPECT_GT(partial, 0.0);
  EXPECT_LT(partial, 1.0);
  const double textbook = std::pow(0.8 * 0.75 * (2.0 / 3.0) * 0.5, 0.25);
  EXPECT_NEAR(bleu("a b c d e", "a b c d f", Language::EN), textbook, 1e-9);
  EXPECT_NEAR(bleu("a b c d e", "a b c d f", Language::EN), 0.668740, 1e-6);
  EXPECT_EQ(bleu("x y", "a b", Language::EN), 0.0);
  EXPECT_EQ(bleu("", "a b", Language::EN), 0.0);
}

TEST(Bleu, MatchesTextbookOracle) {
  std::mt19937_64 rng(5);
  const Strings symbols = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 3000; ++trial) {
    Strings c(rng() % 9), r(1 + rng() % 9);
    for (auto& t : c) t = symbols[rng() % symbols.size()];
    for (auto& t : r) t = symbols[rng() % symbols.size()];
    const double got = bleu_tokens(c, r);
    ASSERT_NEAR(got, oracle::bleu(c, r), 1e-9);
    ASSERT_GE(got, 0.0);
    ASSERT_LE(got, 1.0);
  }
}

// ---------------------------------------------------------------------------
// reports

MetricRow row(std::string group, double v, std::size_t n = 1) {
  MetricRow r;
  r.group = std::move(group);
  r.recall = v;
  r.eir = v;
  r.completeness = v;
  r.hallucination = v;
  r.irrelevancy = v;
  r.rouge_l = v;
  r.bleu = v;
  r.n = n;
  return r;
}

TEST(Report, FormatsPercentages) {
  EXPECT_EQ(format_percent(1.0 / 3), "33.33");
  EXPECT_EQ(format_percent(1.0), "100.00");
  EXPECT_EQ(format_percent(0.0), "0.00");
  EXPECT_EQ(format_percent(std::nullopt), "-");
}

TEST(Report, SingleRowCsv) {
  MetricReport report;
  report.tables.push_back({GroupDimension::QuestionType, {row("FQ", 1.0 / 3)}});
  const auto csv = render_report(std::span(&report, 1), ReportFormat::Csv);
  EXPECT_EQ(csv,
            "dimension,group,recall,eir,completeness,hallucination,irrelevancy,rouge_l,bleu,n,"
            "failures\n"
            "question_type,FQ,33.33,33.33,33.33,33.33,33.33,33.33,33.33,1,0\n");
}

TEST(Report, MarkdownHasOneRowPerTypePlusAverage) {
  MetricReport report;
  DimensionTable table{GroupDimension::QuestionType, {}};
  for (auto t : kAllQuestionTypes) table.rows.push_back(row(std::string(short_code(t)), 0.5));
  table.rows.push_back(row(std::string(kAverageGroup), 0.5, 7));
  report.tables.push_back(table);
  const auto md = render_report(std::span(&report, 1), ReportFormat::Markdown);
  for (auto t : kAllQuestionTypes) {
    EXPECT_NE(md.find("| " + std::string(display_name(t)) + " |"), std::string::npos) << md;
  }
  EXPECT_NE(md.find("| Avg. | 50.00"), std::string::npos);
  EXPECT_NE(md.find("| Question Type | Recall | EIR | Completeness | Hallucination | Irrelevancy | "
                    "Rouge-L | BLEU | n | failures |"),
            std::string::npos);
}

TEST(Report, JsonRoundTripsAndSettingsLabelTables) {
  std::vector<MetricReport> reports(2);
  reports[0].setting = "128-20";
  reports[1].setting = "512-5";
  for (auto& r : reports) {
    r.tables.push_back({GroupDimension::Language, {row("EN", 0.25), row("Avg.", 0.25)}});
  }
  reports[1].tables[0].rows[0].recall.reset();
  const auto json = render_report(reports, ReportFormat::Json);
  const auto parsed = parse_report_json(nlohmann::json::parse(json));
  EXPECT_EQ(render_report(parsed, ReportFormat::Json), json);
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_FALSE(parsed[1].tables[0].rows[0].recall.has_value());

  const auto md = render_report(reports, ReportFormat::Markdown);
  EXPECT_NE(md.find("## Language (128-20)"), std::string::npos);
  const auto csv = render_report(reports, ReportFormat::Csv);
  EXPECT_EQ(csv.rfind("setting,dimension,group", 0), 0u);
  EXPECT_NE(csv.find("512-5,language,EN,-,"), std::string::npos);
}

TEST(Report, RejectsEmptyReportsAndBadPaths) {
  std::vector<MetricReport> none;
  EXPECT_THROW(render_report(none, ReportFormat::Csv), PreconditionError);
  MetricReport report;
  report.tables.push_back({GroupDimension::Scenario, {row("legal", 1.0)}});
  EXPECT_THROW(write_report(std::span(&report, 1), ReportFormat::Csv, "/nonexistent/dir/r.csv"),
               Error);
  EXPECT_EQ(parse_report_format("markdown"), ReportFormat::Markdown);
  EXPECT_EQ(parse_group_dimension("scenario"), GroupDimension::Scenario);
}

}  // namespace
}  // namespace ragscope
