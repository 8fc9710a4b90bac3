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

"""Scenario-specific RAG evaluation: chunking, BM25, retrieval and answer metrics."""

from ragscope._core import (
    CompletionParseError,
    ConfigError,
    DatasetError,
    Error,
    GatewayError,
    PreconditionError,
    bleu,
    bm25_search,
    chunk_document,
    count_words,
    eir,
    evaluate,
    keypoint_metrics,
    normalize,
    parse_judge_labels,
    recall,
    rouge_l,
    split_sentences,
    tokenize,
    validate_dataset,
)

__all__ = [
    "CompletionParseError",
    "ConfigError",
    "DatasetError",
    "Error",
    "GatewayError",
    "PreconditionError",
    "bleu",
    "bm25_search",
    "chunk_document",
    "count_words",
    "eir",
    "evaluate",
    "keypoint_metrics",
    "normalize",
    "parse_judge_labels",
    "recall",
    "rouge_l",
    "split_sentences",
    "tokenize",
    "validate_dataset",
]
