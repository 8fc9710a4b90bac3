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

// Dataset model, text processing, retrieval and retrieval metrics.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "ragscope/corpus.hpp"
#include "ragscope/error.hpp"
#include "ragscope/retrieval.hpp"
#include "ragscope/retrieval_metrics.hpp"
#include "ragscope/textproc.hpp"

namespace ragscope {
namespace {

using Strings = std::vector<std::string>;

const char* kDocLine =
    R"({"kind":"document","id":"d1","language":"EN","scenario":"finance","meta":{"company":"Acme"},"text":"Acme reported revenue of 5 million. The board met twice."})";

std::string record_line(const std::string& qtype, const std::string& doc = "d1") {
  return R"({"kind":"record","id":"r1","language":"EN","question":"What was the revenue?","question_type":")" +
         qtype + R"(","document_ids":[")" + doc +
         R"("],"references":[{"source_document_id":")" + doc +
         R"(","text":"Acme reported revenue of 5 million."}],"answer":"Revenue was 5 million.","keypoints":["Revenue was 5 million","The company is Acme","Figures are annual"]})";
}

std::string expect_dataset_error(const std::string& text, std::size_t* line = nullptr) {
  std::istringstream in(text);
  try {
    parse_dataset(in);
  } catch (const DatasetError& e) {
    if (line != nullptr) *line = e.line();
    return e.what();
  }
  ADD_FAILURE() << "expected a DatasetError";
  return {};
}

// ---------------------------------------------------------------------------
// corpus model

TEST(Corpus, RoundTripsOneDocumentAndOneRecord) {
  std::istringstream in(std::string(kDocLine) + "\n" + record_line("FQ") + "\n");
  const auto dataset = parse_dataset(in);
  ASSERT_EQ(dataset.documents().size(), 1u);
  ASSERT_EQ(dataset.n_records(), 1u);
  EXPECT_EQ(dataset.records()[0].question_type, QuestionType::Factual);
  EXPECT_EQ(dataset.documents()[0].meta.front().second, "Acme");

  std::ostringstream out;
  write_dataset(dataset, out);
  std::istringstream again(out.str());
  EXPECT_EQ(parse_dataset(again), dataset);
}

TEST(Corpus, UnknownQuestionTypeNamesTheLine) {
  std::size_t line = 0;
  EXPECT_EQ(expect_dataset_error(std::string(kDocLine) + "\n" + record_line("XQ"), &line),
            "unknown question type at line 2");
  EXPECT_EQ(line, 2u);
}

TEST(Corpus, DanglingDocumentId) {
  EXPECT_EQ(expect_dataset_error(std::string(kDocLine) + "\n" + record_line("FQ", "d9")),
            "dangling document_id d9 at line 2");
}

TEST(Corpus, MalformedJsonAndDuplicates) {
  std::size_t line = 0;
  const auto what = expect_dataset_error(std::string(kDocLine) + "\n{not json\n", &line);
  EXPECT_EQ(line, 2u);
  EXPECT_NE(what.find("malformed JSON"), std::string::npos);
  EXPECT_EQ(expect_dataset_error(std::string(kDocLine) + "\n" + kDocLine, &line),
            "duplicate document id d1 at line 2");
}

TEST(Corpus, QuestionTypeCodesRoundTrip) {
  for (auto type : kAllQuestionTypes) {
    EXPECT_EQ(parse_question_type(short_code(type)), type);
  }
  EXPECT_FALSE(question_type_from_code("XQ").has_value());
  EXPECT_TRUE(is_multi_document(QuestionType::NumericalComparison));
  EXPECT_FALSE(is_multi_document(QuestionType::Factual));
}

class ValidateRecord : public ::testing::Test {
 protected:
  void SetUp() override {
    std::istringstream in(std::string(kDocLine) + "\n" + record_line("FQ") + "\n");
    dataset = parse_dataset(in);
    record = dataset.records()[0];
  }
  EvalDataset dataset;
  QraRecord record;
};

TEST_F(ValidateRecord, WellFormedFactualHasNoViolations) {
  EXPECT_TRUE(validate_record(record, dataset).empty());
}

TEST_F(ValidateRecord, UnanswerableMayHaveNoReferences) {
  record.question_type = QuestionType::Unanswerable;
  record.references.clear();
  EXPECT_TRUE(validate_record(record, dataset).empty());
}

TEST_F(ValidateRecord, EightKeypointsIsOnlyAWarning) {
  record.keypoints = {"a", "b", "c", "d", "e", "f", "g", "h"};
  const auto v = validate_record(record, dataset);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].severity, Severity::Warning);
  EXPECT_EQ(v[0].field, "keypoints");
  EXPECT_EQ(v[0].message, "keypoints=8 outside 3-5");
}

TEST_F(ValidateRecord, UnlocatableReferenceIsAnError) {
  record.references[0].text = "Acme reported a loss.";
  const auto v = validate_record(record, dataset);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].severity, Severity::Error);
  EXPECT_EQ(v[0].field, "references[0]");
}

TEST(Corpus, BundledFixtureIsValidAndRoundTrips) {
  const auto dataset = load_dataset(fixtures::source_dir() / "data/fixtures/eval_fixture.jsonl");
  EXPECT_EQ(dataset.documents().size(), 10u);
  EXPECT_EQ(dataset.n_records(), 70u);
  for (const auto& record : dataset.records()) {
    for (const auto& v : validate_record(record, dataset)) {
      ADD_FAILURE() << record.id << ": " << v.field << ": " << v.message;
    }
  }
  std::ostringstream out;
  write_dataset(dataset, out);
  EXPECT_EQ(out.str(),
            fixtures::read_file(fixtures::source_dir() / "data/fixtures/eval_fixture.jsonl"));
}

// ---------------------------------------------------------------------------
// textproc

Strings texts(const std::vector<Sentence>& sentences) {
  Strings out;
  for (const auto& s : sentences) out.push_back(s.text);
  return out;
}

TEST(Textproc, SplitsOnTerminators) {
  EXPECT_EQ(texts(split_sentences("Go. Why? Stop!", Language::EN)), (Strings{"Go.", "Why?", "Stop!"}));
  EXPECT_EQ(split_sentences("你好。再见！", Language::CN).size(), 2u);
  EXPECT_EQ(texts(split_sentences("no terminator here", Language::EN)),
            (Strings{"no terminator here"}));
  EXPECT_TRUE(split_sentences("", Language::EN).empty());
}

TEST(Textproc, AbbreviationsAndInitialsDoNotEndSentences) {
  EXPECT_EQ(split_sentences("Mr. Smith arrived. He sat down.", Language::EN).size(), 2u);
  EXPECT_EQ(texts(split_sentences("The judge is M. Gray. Court rose.", Language::EN)),
            (Strings{"The judge is M. Gray.", "Court rose."}));
  EXPECT_EQ(split_sentences("It cost 3.5 million. Done.", Language::EN).size(), 2u);
}

TEST(Textproc, LineBreaksEndSentencesAndWhitespaceCollapses) {
  EXPECT_EQ(texts(split_sentences("HEADING\nThe  cat\tsat.  ", Language::EN)),
            (Strings{"HEADING", "The cat sat."}));
  EXPECT_EQ(texts(split_sentences("甲乙；丙丁？戊", Language::CN)),
            (Strings{"甲乙；", "丙丁？", "戊"}));
}

TEST(Textproc, SpansCoverTheInputInOrder) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto corpus = oracle::make_corpus(seed);
    for (const auto& doc : corpus.documents) {
      const auto sentences = split_sentences(doc.text, doc.language);
      std::size_t cursor = 0;
      for (const auto& s : sentences) {
        ASSERT_LE(cursor, s.span.begin);
        for (std::size_t i = cursor; i < s.span.begin; ++i) {
          ASSERT_TRUE(std::isspace(static_cast<unsigned char>(doc.text[i])));
        }
        EXPECT_EQ(normalize(doc.text.substr(s.span.begin, s.span.size())), s.text);
        cursor = s.span.end;
      }
      for (std::size_t i = cursor; i < doc.text.size(); ++i) {
        ASSERT_TRUE(std::isspace(static_cast<unsigned char>(doc.text[i])));
      }
      EXPECT_EQ(texts(sentences), oracle::split(doc.text, doc.language));
    }
  }
}

TEST(Textproc, Tokenizes) {
  EXPECT_EQ(tokenize("The cat sat.", Language::EN), (Strings{"the", "cat", "sat"}));
  EXPECT_EQ(tokenize("你好世界", Language::CN), (Strings{"你", "好", "世", "界"}));
  EXPECT_EQ(tokenize("GPT4o发布", Language::CN), (Strings{"GPT4o", "发", "布"}));
}

TEST(Textproc, CountsWords) {
  EXPECT_EQ(count_words("the cat sat", Language::EN), 3u);
  EXPECT_EQ(count_words("你好世界", Language::CN), 4u);
  EXPECT_EQ(count_words("", Language::EN), 0u);
}

TEST(Textproc, WordCountIsAdditive) {
  std::mt19937_64 rng(7);
  const auto& en = oracle::en_vocabulary();
  const auto& cn = oracle::cn_vocabulary();
  for (int trial = 0; trial < 200; ++trial) {
    std::string a, b, x, y;
    for (int i = 0; i < static_cast<int>(rng() % 6); ++i) a += en[rng() % en.size()] + " ";
    for (int i = 0; i < static_cast<int>(rng() % 6); ++i) b += en[rng() % en.size()] + ".";
    for (int i = 0; i < static_cast<int>(rng() % 6); ++i) x += cn[rng() % cn.size()];
    for (int i = 0; i < static_cast<int>(rng() % 6); ++i) y += cn[rng() % cn.size()] + "。";
    EXPECT_EQ(count_words(a, Language::EN) + count_words(b, Language::EN),
              count_words(a + " " + b, Language::EN));
    EXPECT_EQ(count_words(x, Language::CN) + count_words(y, Language::CN),
              count_words(x + y, Language::CN));
  }
}

TEST(Textproc, NormalizesToNfc) {
  EXPECT_EQ(nfc("e\xCC\x81"), "\xC3\xA9");
  EXPECT_EQ(normalize("  a \n\t b  "), "a b");
  EXPECT_EQ(fold_case("The CAT"), "the cat");
}

TEST(Textproc, LocatesAcrossWhitespaceDifferences) {
  const std::string hay = "First line.\nSecond   sentence here. Third.";
  const auto span = locate_normalized(hay, "Second sentence  here.");
  ASSERT_TRUE(span.has_value());
  EXPECT_EQ(hay.substr(span->begin, span->size()), "Second   sentence here.");
  EXPECT_FALSE(locate_normalized(hay, "Fourth.").has_value());
  const auto snapped = snap_to_sentences(hay, Language::EN, *locate_normalized(hay, "sentence"));
  EXPECT_EQ(hay.substr(snapped.begin, snapped.size()), "Second   sentence here.");
}

// ---------------------------------------------------------------------------
// retrieval

Document words_doc(std::size_t n, std::string id = "doc") {
  Document doc;
  doc.id = std::move(id);
  doc.scenario = "s";
  for (std::size_t i = 0; i < n; ++i) doc.text += "w" + std::to_string(i) + (i % 9 == 8 ? ". " : " ");
  return doc;
}

TEST(Retrieval, ChunksGreedily) {
  const auto chunks = chunk_document(words_doc(1000), 512, false);
  ASSERT_EQ(chunks.size(), 2u);
  EXPECT_EQ(chunks[0].token_count(), 512u);
  EXPECT_EQ(chunks[1].token_count(), 488u);
  EXPECT_EQ(chunks[0].id, "doc#0000");
  EXPECT_EQ(chunks[1].id, "doc#0001");
  EXPECT_EQ(chunk_document(words_doc(10), 512, false).size(), 1u);
}

TEST(Retrieval, MetaPrefixesEveryChunkWithoutUsingTheBudget) {
  auto doc = words_doc(30);
  doc.meta = {{"company", "Acme"}};
  const auto chunks = chunk_document(doc, 10, true);
  ASSERT_EQ(chunks.size(), 3u);
  for (const auto& c : chunks) {
    EXPECT_EQ(c.render().rfind("company: Acme", 0), 0u);
    EXPECT_EQ(c.token_count(), 10u);
  }
  EXPECT_TRUE(chunk_document(doc, 10, false)[0].meta_prefix.empty());
}

TEST(Retrieval, RejectsEmptyDocumentsAndBadSizes) {
  Document doc;
  doc.id = "e";
  doc.text = " .. ";
  EXPECT_THROW(chunk_document(doc, 5, false), PreconditionError);
  EXPECT_THROW(chunk_document(words_doc(3), 0, false), PreconditionError);
  RetrieverSpec spec;
  spec.top_k = 0;
  EXPECT_THROW(spec.validate(), PreconditionError);
}

TEST(Retrieval, ChunkBodiesAreLossless) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto corpus = oracle::make_corpus(seed);
    for (const auto& doc : corpus.documents) {
      const auto chunks = chunk_document(doc, corpus.chunk_size, corpus.with_meta);
      std::string joined;
      Strings tokens;
      std::size_t expected_begin = 0;
      for (const auto& c : chunks) {
        EXPECT_EQ(c.token_begin, expected_begin);
        EXPECT_GT(c.token_count(), 0u);
        EXPECT_LE(c.token_count(), corpus.chunk_size);
        expected_begin = c.token_end;
        joined += c.body;
        const auto part = tokenize(c.body, doc.language);
        EXPECT_EQ(part.size(), c.token_count());
        tokens.insert(tokens.end(), part.begin(), part.end());
      }
      EXPECT_EQ(joined, doc.text);
      EXPECT_EQ(tokens, tokenize(doc.text, doc.language));
    }
  }
}

std::vector<Chunk> tiny_corpus() {
  std::vector<Chunk> chunks;
  const Strings bodies = {"a b", "b c", "c d"};
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    Document doc;
    doc.id = "c" + std::to_string(i);
    doc.text = bodies[i];
    auto part = chunk_document(doc, 512, false);
    chunks.insert(chunks.end(), part.begin(), part.end());
  }
  return chunks;
}

TEST(Retrieval, IndexCountsTerms) {
  const auto index = build_index(tiny_corpus(), {});
  EXPECT_EQ(index.size(), 3u);
  EXPECT_EQ(index.document_frequency("a"), 1u);
  EXPECT_EQ(index.document_frequency("b"), 2u);
  EXPECT_EQ(index.document_frequency("z"), 0u);
  EXPECT_DOUBLE_EQ(index.average_length(), 2.0);
  EXPECT_THROW(build_index({}, {}), PreconditionError);
}

TEST(Retrieval, Bm25SingleTermCase) {
  const auto index = build_index(tiny_corpus(), {});
  const Strings q = {"c"};
  const double expected = std::log(1.6) * 2.2 / 2.2;
  EXPECT_NEAR(bm25_score(index, q, "c1#0000"), expected, 1e-12);
  EXPECT_NEAR(bm25_score(index, q, "c1#0000"), 0.4700, 1e-4);
  EXPECT_EQ(bm25_score(index, Strings{"zzz"}, "c1#0000"), 0.0);
  EXPECT_EQ(bm25_score(index, Strings{"b"}, "c0#0000"), bm25_score(index, Strings{"b"}, "c1#0000"));
  EXPECT_THROW(bm25_score(index, q, "nope"), PreconditionError);
}

TEST(Retrieval, TopKBoundsAndTies) {
  const auto index = build_index(tiny_corpus(), {});
  const auto all = retrieve_topk(index, "b", 10, Language::EN);
  ASSERT_EQ(all.ranked.size(), 3u);
  EXPECT_EQ(all.ranked[0].chunk_id, "c0#0000");
  EXPECT_EQ(all.ranked[1].chunk_id, "c1#0000");
  EXPECT_EQ(all.ranked[0].score, all.ranked[1].score);
  EXPECT_EQ(all.ranked[2].score, 0.0);
  EXPECT_THROW(retrieve_topk(index, "b", 0, Language::EN), PreconditionError);
}

TEST(Retrieval, QueryIsCappedAt128Tokens) {
  const auto index = build_index(tiny_corpus(), {});
  std::string prefix;
  for (int i = 0; i < 128; ++i) prefix += (i % 2 ? "a " : "x ");
  const auto a = retrieve_topk(index, prefix, 3, Language::EN);
  const auto b = retrieve_topk(index, prefix + "c c c d d d", 3, Language::EN);
  EXPECT_EQ(a.ranked, b.ranked);
}

TEST(Retrieval, Bm25MatchesExhaustiveScoring) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto corpus = oracle::make_corpus(seed);
    auto chunks = fixtures::chunk_all(corpus);
    if (chunks.size() > 50) continue;
    const auto index = build_index(chunks, {});
    std::vector<Strings> bags;
    for (const auto& c : chunks) bags.push_back(oracle::words(c.render()));
    for (const auto& query : corpus.queries) {
      const auto qtokens = oracle::words(query.question);
      std::vector<std::pair<double, std::string>> expected;
      for (std::size_t i = 0; i < chunks.size(); ++i) {
        expected.push_back({oracle::bm25(bags, qtokens, i), chunks[i].id});
        EXPECT_NEAR(bm25_score(index, qtokens, chunks[i].id), expected.back().first, 1e-9);
      }
      std::sort(expected.begin(), expected.end(), [](const auto& x, const auto& y) {
        if (std::abs(x.first - y.first) > 1e-12) return x.first > y.first;
        return x.second < y.second;
      });
      const auto got = retrieve_topk(index, query.question, chunks.size(), corpus.language);
      ASSERT_EQ(got.ranked.size(), chunks.size());
      for (std::size_t i = 0; i < chunks.size(); ++i) {
        EXPECT_NEAR(got.ranked[i].score, expected[i].first, 1e-9);
        const bool tied_prev = i > 0 && std::abs(expected[i - 1].first - expected[i].first) <= 1e-9;
        const bool tied_next = i + 1 < chunks.size() &&
                               std::abs(expected[i + 1].first - expected[i].first) <= 1e-9;
        if (!tied_prev && !tied_next) {
          EXPECT_EQ(got.ranked[i].chunk_id, expected[i].second);
        }
      }
      for (std::size_t k = 1; k < chunks.size(); ++k) {
        const auto shorter = retrieve_topk(index, query.question, k, corpus.language);
        EXPECT_TRUE(std::equal(shorter.ranked.begin(), shorter.ranked.end(), got.ranked.begin()));
      }
    }
  }
}

class UnitEmbedder : public Embedder {
 public:
  std::vector<std::vector<float>> embed(std::span<const std::string> texts) override {
    std::vector<std::vector<float>> out;
    for (const auto& t : texts) {
      std::vector<float> v(4, 0.0f);
      for (const auto& w : tokenize(t, Language::EN)) v[static_cast<unsigned char>(w[0]) % 4] += 2.0f;
      out.push_back(v);
    }
    return out;
  }
};

TEST(Retrieval, EmbeddingIndexNormalizesVectors) {
  UnitEmbedder embedder;
  RetrieverSpec spec;
  spec.kind = RetrieverKind::Embedding;
  const auto index = build_index(tiny_corpus(), spec, &embedder);
  ASSERT_EQ(index.embeddings().size(), 3u);
  for (const auto& v : index.embeddings()) {
    double norm = 0;
    for (float x : v) norm += static_cast<double>(x) * x;
    EXPECT_NEAR(norm, 1.0, 1e-6);
  }
  const auto hits = retrieve_topk(index, "d", 1, Language::EN);
  ASSERT_EQ(hits.ranked.size(), 1u);
  EXPECT_EQ(hits.ranked[0].chunk_id, "c2#0000");
  EXPECT_THROW(build_index(tiny_corpus(), spec, nullptr), ConfigError);
}

class ZeroEmbedder : public Embedder {
 public:
  std::vector<std::vector<float>> embed(std::span<const std::string> texts) override {
    return std::vector<std::vector<float>>(texts.size(), std::vector<float>(4, 0.0f));
  }
};

TEST(Retrieval, ZeroVectorEmbeddingIsAnError) {
  ZeroEmbedder embedder;
  RetrieverSpec spec;
  spec.kind = RetrieverKind::Embedding;
  EXPECT_THROW(build_index(tiny_corpus(), spec, &embedder), GatewayError);
}

// ---------------------------------------------------------------------------
// retrieval metrics

std::vector<GroundTruthReference> refs(const Strings& texts) {
  std::vector<GroundTruthReference> out;
  for (const auto& t : texts) out.push_back({"d", t});
  return out;
}

TEST(RetrievalMetrics, RecallExamples) {
  EXPECT_EQ(compute_recall(refs({"The cat sat."}), Strings{"The cat sat."}, Language::EN).value(), 1.0);
  EXPECT_EQ(compute_recall(refs({"The cat sat."}), Strings{}, Language::EN).value(), 0.0);
  const Strings retrieved = {"S one here. S three here."};
  const auto r = compute_recall(refs({"S one here. S two here.", "S three here."}), retrieved,
                                Language::EN);
  EXPECT_EQ(r.value(), 0.5);
  EXPECT_FALSE(r.outcomes[0].matched);
  EXPECT_TRUE(r.outcomes[1].matched);
  EXPECT_EQ(r.outcomes[1].matched_word_count, 3u);
  EXPECT_THROW(compute_recall({}, retrieved, Language::EN), PreconditionError);
}

TEST(RetrievalMetrics, RecallNeedsOnePassageButEirPools) {
  const Strings retrieved = {"Alpha beta.", "Gamma delta."};
  const auto reference = refs({"Alpha beta. Gamma delta."});
  EXPECT_EQ(compute_recall(reference, retrieved, Language::EN).value(), 0.0);
  EXPECT_EQ(compute_eir(reference, retrieved, Language::EN).value(), 1.0);
}

TEST(RetrievalMetrics, EirExamples) {
  EXPECT_EQ(compute_eir(refs({"The cat sat."}), Strings{"The cat sat."}, Language::EN).value(), 1.0);
  const Strings retrieved = {"The cat sat down. One two three four five six.",
                             "Red green blue cyan black white pink gold rose teal."};
  const auto eir = compute_eir(refs({"The cat sat down."}), retrieved, Language::EN);
  EXPECT_EQ(eir.retrieved_words, 20u);
  EXPECT_EQ(eir.matched_words, 4u);
  EXPECT_DOUBLE_EQ(eir.value(), 0.2);
  EXPECT_EQ(compute_eir(refs({"Nothing like it."}), retrieved, Language::EN).value(), 0.0);
  EXPECT_THROW(compute_eir(refs({"x."}), Strings{}, Language::EN), PreconditionError);
}

TEST(RetrievalMetrics, MatchOracleOnSyntheticCorpora) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto corpus = oracle::make_corpus(seed);
    const auto index = fixtures::index_of(corpus);
    for (const auto& query : corpus.queries) {
      const auto gt = oracle::to_references(query.references, corpus.language);
      for (std::size_t k : {1, 3, 8}) {
        auto retrieved = fixtures::retrieved_renders(index, query.question, k, corpus.language);
        const double recall = compute_recall(gt, retrieved, corpus.language).value();
        const double eir = compute_eir(gt, retrieved, corpus.language).value();
        EXPECT_EQ(recall, oracle::recall(query.references, retrieved, corpus.language)) << seed;
        EXPECT_EQ(eir, oracle::eir(query.references, retrieved, corpus.language)) << seed;
        EXPECT_GE(eir, 0.0);
        std::size_t reference_words = 0;
        std::set<std::string> distinct;
        std::size_t sentences = 0;
        for (const auto& ref : query.references) {
          for (const auto& s : ref.sentences) {
            reference_words += oracle::word_count(s);
            distinct.insert(s);
            ++sentences;
          }
        }
        std::size_t retrieved_words = 0;
        for (const auto& r : retrieved) retrieved_words += oracle::word_count(r);
        EXPECT_LE(eir, static_cast<double>(reference_words) / static_cast<double>(retrieved_words));
        // Repeated sentences are counted once per reference, so the unit
        // bound needs distinct reference sentences.
        if (distinct.size() == sentences) EXPECT_LE(eir, 1.0);
        std::reverse(retrieved.begin(), retrieved.end());
        EXPECT_EQ(compute_recall(gt, retrieved, corpus.language).value(), recall);
        EXPECT_EQ(compute_eir(gt, retrieved, corpus.language).value(), eir);
      }
    }
  }
}

TEST(RetrievalMetrics, AddingAPassageNeverLowersRecall) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto corpus = oracle::make_corpus(seed);
    const auto chunks = fixtures::chunk_all(corpus);
    for (const auto& query : corpus.queries) {
      const auto gt = oracle::to_references(query.references, corpus.language);
      Strings retrieved;
      double last = 0.0;
      for (const auto& c : chunks) {
        retrieved.push_back(c.body);
        const double now = compute_recall(gt, retrieved, corpus.language).value();
        EXPECT_GE(now, last);
        last = now;
      }
    }
  }
}

}  // namespace
}  // namespace ragscope
