"""Question answering over a static fact base.

Templated questions are asked about the current location and every entity already in the
belief graph, then once more about entities the answers introduced. Answers become
InferredQA triples.
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

import msgspec

from .._logging import get_logger
from ..constants import QA_FOLLOWUP_DEPTH
from ..extractor import canonicalize
from ..models import RelationLabel, Triple, TripleSource
from .tsv import KnowledgeBaseError, iter_rows, read_text

if TYPE_CHECKING:
    from .._types import EntityId
    from ..graph import KnowledgeGraph

logger = get_logger(__name__, "commonsense")


class Fact(msgspec.Struct, frozen=True):
    entity: str
    relation: str
    value: str


class FactBase(msgspec.Struct, frozen=True):
    facts: tuple[Fact, ...] = ()
    source: str = "<memory>"

    def answers(self, entity: EntityId, relation: str) -> list[str]:
        return [f.value for f in self.facts if f.entity == entity and f.relation == relation]

    @property
    def entities(self) -> frozenset[EntityId]:
        return frozenset(e for f in self.facts for e in (f.entity, f.value))

    def __len__(self) -> int:
        return len(self.facts)


class Question(msgspec.Struct, frozen=True):
    """A question template, the fact relation answering it and how answers become triples."""

    template: str
    relation: str
    label: RelationLabel
    # True: <answer, label, X>; False: <X, label, answer>
    answer_is_subject: bool

    def text(self, entity: EntityId) -> str:
        return self.template.format(entity.replace("_", " "))

    def ask(self, facts: FactBase, entity: EntityId) -> list[Triple]:
        triples = []
        for answer in facts.answers(entity, self.relation):
            subject, obj = (answer, entity) if self.answer_is_subject else (entity, answer)
            triples.append(Triple(subject, self.label, obj, TripleSource.INFERRED_QA))
        return triples


class QuestionSet(msgspec.Struct, frozen=True):
    questions: tuple[Question, ...]

    def __iter__(self):
        return iter(self.questions)


DEFAULT_QUESTIONS = QuestionSet(
    questions=(
        Question("What is in {}?", "contains", RelationLabel.IN, answer_is_subject=True),
        Question("Where is {}?", "location", RelationLabel.IN, answer_is_subject=False),
        Question(
            "What attributes does {} possess?",
            "attribute",
            RelationLabel.ATTRIBUTE_OF,
            answer_is_subject=True,
        ),
    )
)


def parse_facts(text: str, source: str = "<memory>") -> FactBase:
    facts = []
    for lineno, (entity, relation, value) in iter_rows(text, 3, source):
        try:
            facts.append(Fact(canonicalize(entity), relation.lower(), canonicalize(value)))
        except ValueError as e:
            msg = f"{source}:{lineno}: {e}"
            raise KnowledgeBaseError(msg) from e
    return FactBase(facts=tuple(dict.fromkeys(facts)), source=source)


def load_facts(path: str | Path) -> FactBase:
    """Load an ``entity<TAB>relation<TAB>value`` file."""
    facts = parse_facts(read_text(path), source=str(path))
    logger.debug(f"Loaded {len(facts)} facts from {Path(path).name}")
    return facts


def qa_infer(
    facts: FactBase,
    questions: QuestionSet,
    location: EntityId,
    kg: KnowledgeGraph,
    followups: int = QA_FOLLOWUP_DEPTH,
) -> list[Triple]:
    """Answer every question about ``location`` and the graph's entities."""
    subjects = [location, *sorted(kg.entities - {location})]
    asked: set[str] = set()
    triples: list[Triple] = []

    for round_index in range(followups + 1):
        fresh: list[Triple] = []
        for entity in subjects:
            asked.add(entity)
            for question in questions:
                fresh.extend(question.ask(facts, entity))
        triples.extend(fresh)
        if round_index == followups:
            break
        proposed = {e for t in fresh for e in (t.subject, t.object)}
        subjects = sorted(proposed - asked - kg.entities)
        if not subjects:
            break

    return list(dict.fromkeys(triples))
