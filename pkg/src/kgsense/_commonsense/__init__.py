"""Commonsense providers: HasA inference, question answering and command-sequence scoring."""

from __future__ import annotations

from .hasa import HasAKnowledgeBase, infer_hasa, load_hasa, parse_hasa
from .qa import (
    DEFAULT_QUESTIONS,
    FactBase,
    Question,
    QuestionSet,
    load_facts,
    parse_facts,
    qa_infer,
)
from .sequence import (
    SequenceModel,
    fit_sequence_model,
    load_corpus,
    parse_corpus,
    rerank,
    score_sequence,
)
from .tsv import KnowledgeBaseError

__all__ = (
    "DEFAULT_QUESTIONS",
    "FactBase",
    "HasAKnowledgeBase",
    "KnowledgeBaseError",
    "Question",
    "QuestionSet",
    "SequenceModel",
    "fit_sequence_model",
    "infer_hasa",
    "load_corpus",
    "load_facts",
    "load_hasa",
    "parse_corpus",
    "parse_facts",
    "parse_hasa",
    "qa_infer",
    "rerank",
    "score_sequence",
)
