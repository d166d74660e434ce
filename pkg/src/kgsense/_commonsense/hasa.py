"""Static HasA knowledge: which objects a kind of location usually contains."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

import msgspec

from .._logging import get_logger
from ..extractor import canonicalize
from ..models import RelationLabel, Triple, TripleSource
from .tsv import KnowledgeBaseError, iter_rows, read_text

if TYPE_CHECKING:
    from .._types import EntityId, HasAMap

logger = get_logger(__name__, "commonsense")


class HasAKnowledgeBase(msgspec.Struct, frozen=True):
    mapping: HasAMap = msgspec.field(default_factory=dict)
    source: str = "<memory>"

    def get(self, location: EntityId) -> frozenset[EntityId]:
        return self.mapping.get(location, frozenset())

    @property
    def entities(self) -> frozenset[EntityId]:
        return frozenset(self.mapping).union(*self.mapping.values())

    def __len__(self) -> int:
        return len(self.mapping)


def parse_hasa(text: str, source: str = "<memory>") -> HasAKnowledgeBase:
    mapping: dict[str, set[str]] = {}
    for lineno, (location, obj) in iter_rows(text, 2, source):
        try:
            mapping.setdefault(canonicalize(location), set()).add(canonicalize(obj))
        except ValueError as e:
            msg = f"{source}:{lineno}: {e}"
            raise KnowledgeBaseError(msg) from e
    return HasAKnowledgeBase(
        mapping={location: frozenset(objects) for location, objects in mapping.items()},
        source=source,
    )


def load_hasa(path: str | Path) -> HasAKnowledgeBase:
    """Load a ``location<TAB>object`` file; an empty file gives an empty base."""
    kb = parse_hasa(read_text(path), source=str(path))
    logger.debug(f"Loaded HasA entries for {len(kb)} location(s) from {Path(path).name}")
    return kb


def infer_hasa(kb: HasAKnowledgeBase, location: EntityId) -> list[Triple]:
    """``<location, HasA, o>`` and ``<o, In, location>`` for every object the base lists."""
    triples = []
    for obj in sorted(kb.get(location)):
        triples.append(Triple(location, RelationLabel.HAS_A, obj, TripleSource.INFERRED_HASA))
        triples.append(Triple(obj, RelationLabel.IN, location, TripleSource.INFERRED_HASA))
    return triples
