# Copyright 2026 The ragscope Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math
import os
from pathlib import Path

import pytest

import ragscope

SOURCE_DIR = Path(os.environ.get("RAGSCOPE_SOURCE_DIR", Path(__file__).resolve().parents[2]))
FIXTURE = SOURCE_DIR / "data" / "fixtures" / "eval_fixture.jsonl"


def test_sentences_and_tokens():
    assert ragscope.split_sentences("Mr. Smith left. He came back!") == [
        "Mr. Smith left.",
        "He came back!",
    ]
    assert ragscope.split_sentences("猫坐着。狗跑了！", "CN") == ["猫坐着。", "狗跑了！"]
    assert ragscope.tokenize("The Cat, sat.") == ["the", "cat", "sat"]
    assert ragscope.count_words("猫坐着", "CN") == 3


def test_chunking_is_lossless():
    text = " ".join(f"word{i}" for i in range(1000))
    chunks = ragscope.chunk_document("doc", text, chunk_size=512)
    assert [c["id"] for c in chunks] == ["doc#0000", "doc#0001"]
    assert [c["token_end"] - c["token_begin"] for c in chunks] == [512, 488]
    assert "".join(c["body"] for c in chunks) == text


def test_bm25_single_term_case():
    hits = ragscope.bm25_search([("c0", "a b"), ("c1", "b c"), ("c2", "c d")], "b", k=2)
    assert [h[0] for h in hits] == ["c0#0000", "c1#0000"]
    assert hits[0][1] == pytest.approx(math.log(1.6), abs=1e-9)


def test_retrieval_metrics():
    refs = [("d", "Alpha beta. Gamma delta."), ("d", "Nothing here.")]
    retrieved = ["Alpha beta. Gamma delta.", "Other words entirely here now."]
    assert ragscope.recall(refs, retrieved) == 0.5
    assert ragscope.eir(refs, retrieved) == pytest.approx(4 / 9)


def test_answer_metrics():
    assert ragscope.rouge_l("the cat", "the cat sat") == pytest.approx(0.8)
    assert ragscope.bleu("x y", "a b") == 0.0
    m = ragscope.keypoint_metrics(["Covered", "Contradicted", "Untouched", "Covered"])
    assert m["completeness"] == 0.5
    assert m["completeness"] + m["hallucination"] + m["irrelevancy"] == 1.0
    assert ragscope.parse_judge_labels("[[[Relevant]]] [[[Wrong]]]", 2) == ["Covered", "Contradicted"]
    with pytest.raises(ragscope.CompletionParseError):
        ragscope.parse_judge_labels("[[[Relevant]]]", 2)
    with pytest.raises(ragscope.PreconditionError):
        ragscope.keypoint_metrics([])


def test_fixture_validates_and_evaluates():
    assert ragscope.validate_dataset(FIXTURE) == []
    config = {"dataset": str(FIXTURE), "oracle_answers": True, "group_by": ["question_type"]}
    report = json.loads(ragscope.evaluate(json.dumps(config)))
    rows = report["reports"][0]["tables"][0]["rows"]
    assert rows[-1]["group"] == "Avg."
    assert all(row["completeness"] == 100.0 for row in rows)
    markdown = ragscope.evaluate(json.dumps(config), format="markdown")
    assert "| Avg. |" in markdown


def test_errors_are_typed():
    with pytest.raises(ragscope.DatasetError):
        ragscope.validate_dataset(SOURCE_DIR / "README.md")
    with pytest.raises(ragscope.Error):
        ragscope.tokenize("x", "FR")
