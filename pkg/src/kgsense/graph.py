"""The agent's knowledge-graph belief state, action filtering and feature encoding."""

from __future__ import annotations

import hashlib
import re
from functools import cache
from typing import TYPE_CHECKING

import numpy as np

from ._logging import get_logger
from .constants import DEFAULT_HASH_WIDTH, PLAYER
from .models import RelationLabel, TripleSource

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Sequence

    from ._commonsense.hasa import HasAKnowledgeBase
    from ._commonsense.qa import FactBase
    from ._types import EntityId, FloatArray
    from .models import ActionCommand, GameSpec, Triple

logger = get_logger(__name__, "graph")

_re_token = re.compile(r"[a-z0-9']+")

_PLACEMENT = (RelationLabel.IN, RelationLabel.ON)
_POSSESSION = (RelationLabel.HAS, RelationLabel.WEARING)


class KnowledgeGraph:
    """An immutable set of triples; ``update`` returns a new graph.

    Triples are keyed by (subject, relation, object). When the same key arrives with
    different sources, the Observed copy is kept.
    """

    __slots__ = ("_entities", "_near", "_triples")

    def __init__(self, triples: Iterable[Triple] = ()):
        store: dict[Triple, Triple] = {}
        for triple in triples:
            _merge(store, triple)
        self._triples = store
        self._entities = frozenset(
            entity for triple in store for entity in (triple.subject, triple.object)
        )
        self._near: dict[str, frozenset[str]] = {}

    @property
    def triples(self) -> frozenset[Triple]:
        return frozenset(self._triples.values())

    @property
    def entities(self) -> frozenset[EntityId]:
        return self._entities

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples.values())

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return self._triples.keys() == other._triples.keys()

    def __hash__(self) -> int:
        return hash(frozenset(self._triples))

    def __repr__(self) -> str:
        return f"KnowledgeGraph({len(self)} triples, {len(self._entities)} entities)"

    def source_of(self, triple: Triple) -> TripleSource | None:
        stored = self._triples.get(triple)
        return None if stored is None else stored.source

    def update(self, new: Iterable[Triple]) -> KnowledgeGraph:
        """Return a graph holding every prior triple and every new one."""
        store = dict(self._triples)
        changed = False
        for triple in new:
            changed |= _merge(store, triple)
        if not changed:
            return self
        return KnowledgeGraph(store.values())

    def contains_entity(self, entity: EntityId) -> bool:
        return entity in self._entities

    def filter_commands(self, candidates: Sequence[ActionCommand]) -> list[ActionCommand]:
        """Keep candidates whose every argument is in the graph, in input order."""
        return [
            command
            for command in candidates
            if all(arg in self._entities for arg in command.args)
        ]

    def near(self, location: EntityId) -> frozenset[EntityId]:
        """Entities the graph places at ``location`` (through In/On holders) or on the player."""
        if location in self._near:
            return self._near[location]

        found: set[str] = set()
        holders = {location}
        frontier = [location]
        while frontier:
            holder = frontier.pop()
            for triple in self._triples:
                if triple.relation in _PLACEMENT and triple.object == holder:
                    found.add(triple.subject)
                    if triple.subject not in holders:
                        holders.add(triple.subject)
                        frontier.append(triple.subject)
        for triple in self._triples:
            if triple.subject == PLAYER and triple.relation in _POSSESSION:
                found.add(triple.object)
        if PLAYER in self._entities:
            found.add(PLAYER)
        found.discard(location)

        result = frozenset(found)
        self._near[location] = result
        return result

    def dump(self) -> str:
        """Sorted ``subject<TAB>relation<TAB>object<TAB>source`` lines."""
        lines = sorted(
            f"{t.subject}\t{t.relation.value}\t{t.object}\t{t.source.value}"
            for t in self._triples.values()
        )
        return "\n".join(lines)


def _merge(store: dict[Triple, Triple], triple: Triple) -> bool:
    existing = store.get(triple)
    if existing is None:
        store[triple] = triple
        return True
    if triple.source is TripleSource.OBSERVED and existing.source is not TripleSource.OBSERVED:
        store[triple] = triple
        return True
    return False


def update(kg: KnowledgeGraph, new: Iterable[Triple]) -> KnowledgeGraph:
    return kg.update(new)


def contains_entity(kg: KnowledgeGraph, entity: EntityId) -> bool:
    return kg.contains_entity(entity)


def filter_commands(
    kg: KnowledgeGraph, candidates: Sequence[ActionCommand]
) -> list[ActionCommand]:
    return kg.filter_commands(candidates)


# =============================================================================
# FEATURES
# =============================================================================


class Vocabulary:
    """Dense, sorted entity index fixed for an experiment run."""

    def __init__(self, entities: Iterable[EntityId]):
        self.entities: tuple[str, ...] = tuple(sorted(set(entities)))
        self.index: dict[str, int] = {entity: i for i, entity in enumerate(self.entities)}

    @classmethod
    def build(
        cls,
        spec: GameSpec,
        hasa: HasAKnowledgeBase | None = None,
        facts: FactBase | None = None,
    ) -> Vocabulary:
        entities = {PLAYER, *spec.rooms, *spec.objects}
        if hasa is not None:
            entities |= hasa.entities
        if facts is not None:
            entities |= facts.entities
        vocab = cls(entities)
        logger.debug(f"Vocabulary of {len(vocab)} entities")
        return vocab

    def __len__(self) -> int:
        return len(self.entities)

    def __contains__(self, entity: object) -> bool:
        return entity in self.index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self.entities == other.entities

    def __hash__(self) -> int:
        return hash(self.entities)


@cache
def token_bin(token: str, width: int) -> int:
    """Stable hash bucket of a token; the builtin ``hash`` is salted per process."""
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") % width


def observation_bins(text: str, width: int = DEFAULT_HASH_WIDTH) -> list[int]:
    return sorted({token_bin(token, width) for token in _re_token.findall(text.lower())})


def encode(
    kg: KnowledgeGraph,
    last_observation: str,
    vocab: Vocabulary,
    width: int = DEFAULT_HASH_WIDTH,
) -> FloatArray:
    """Entity-presence block over ``vocab`` followed by ``width`` hashed token bins."""
    features = np.zeros(len(vocab) + width, dtype=np.float64)
    indices = [vocab.index[entity] for entity in kg.entities if entity in vocab.index]
    features[np.asarray(indices, dtype=np.intp)] = 1.0
    bins = np.asarray(observation_bins(last_observation, width), dtype=np.intp)
    features[len(vocab) + bins] = 1.0
    return features
