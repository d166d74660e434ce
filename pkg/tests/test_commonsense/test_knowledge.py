"""Tests for the HasA base and question answering over facts."""

from __future__ import annotations

import pytest

from kgsense._commonsense import (
    DEFAULT_QUESTIONS,
    KnowledgeBaseError,
    infer_hasa,
    load_hasa,
    parse_facts,
    parse_hasa,
    qa_infer,
)
from kgsense.graph import KnowledgeGraph
from kgsense.models import RelationLabel, Triple, TripleSource


class TestHasA:
    """Test the location -> objects base."""

    def test_infer_two_triples_per_object(self, hasa_kb):
        """Test each listed object yields a HasA and an In triple."""
        triples = infer_hasa(hasa_kb, "bathroom")

        assert len(triples) == 2 * len(hasa_kb.get("bathroom"))
        assert Triple("bathroom", RelationLabel.HAS_A, "sink") in triples
        assert Triple("sink", RelationLabel.IN, "bathroom") in triples
        assert all(triple.source is TripleSource.INFERRED_HASA for triple in triples)

    def test_unknown_location(self, hasa_kb):
        """Test a location the base does not list infers nothing."""
        assert infer_hasa(hasa_kb, "garage") == []

    def test_parse_canonicalizes(self):
        """Test phrases in the file become entity ids."""
        kb = parse_hasa("# header\nliving room\tthe potted plant\n")

        assert kb.get("living_room") == frozenset({"potted_plant"})
        assert kb.entities == frozenset({"living_room", "potted_plant"})

    def test_malformed_row(self):
        """Test a row with the wrong number of fields names its line."""
        with pytest.raises(KnowledgeBaseError, match=r"<memory>:2: expected 2"):
            parse_hasa("bathroom\tsink\nbathroom\n")

    def test_missing_file(self, tmp_path):
        """Test a missing file is reported."""
        with pytest.raises(KnowledgeBaseError, match="Knowledge file not found"):
            load_hasa(tmp_path / "hasa.tsv")

    def test_empty_file(self, tmp_path):
        """Test an empty file gives an empty base."""
        path = tmp_path / "hasa.tsv"
        path.write_text("", encoding="utf-8")

        assert len(load_hasa(path)) == 0


class TestQuestionAnswering:
    """Test templated questions over the fact base."""

    def test_location_question(self, facts):
        """Test 'What is in X?' answers become In triples about the location."""
        triples = qa_infer(facts, DEFAULT_QUESTIONS, "bathroom", KnowledgeGraph(), followups=0)

        objects = ("sink", "toilet", "shower", "towel")
        assert set(triples) == {Triple(obj, RelationLabel.IN, "bathroom") for obj in objects}
        assert all(triple.source is TripleSource.INFERRED_QA for triple in triples)

    def test_followup_round(self, facts):
        """Test answers introduce entities that are asked about once more."""
        without = qa_infer(facts, DEFAULT_QUESTIONS, "bathroom", KnowledgeGraph(), followups=0)
        with_followups = qa_infer(facts, DEFAULT_QUESTIONS, "bathroom", KnowledgeGraph())
        water = Triple("water", RelationLabel.ATTRIBUTE_OF, "sink")

        assert water not in without
        assert water in with_followups
        assert set(without) <= set(with_followups)

    def test_graph_entities_are_asked(self, facts):
        """Test entities already in the graph are asked about."""
        kg = KnowledgeGraph([Triple("watch", RelationLabel.IN, "bed_nook")])
        triples = qa_infer(facts, DEFAULT_QUESTIONS, "bed_nook", kg, followups=0)

        assert triples == [Triple("fragile", RelationLabel.ATTRIBUTE_OF, "watch")]

    def test_question_text(self):
        """Test question templates render entity ids as words."""
        question = DEFAULT_QUESTIONS.questions[0]
        assert question.text("living_room") == "What is in living room?"

    def test_duplicate_facts_collapse(self):
        """Test repeated fact lines are kept once."""
        facts = parse_facts("sink\tattribute\twater\nSink\tATTRIBUTE\tWater\n")
        assert len(facts) == 1
