"""Templated action generation over the belief graph."""

from __future__ import annotations

from itertools import product
from typing import TYPE_CHECKING

import msgspec

from .._engine.parser import make_command
from ..constants import ANY_THING

if TYPE_CHECKING:
    from .._types import EntityId
    from ..graph import KnowledgeGraph
    from ..models import ActionCommand, GameSpec, Verb


class ActionTemplate(msgspec.Struct, frozen=True):
    """A declared verb whose slots are filled from belief-graph entities."""

    verb: Verb

    @property
    def name(self) -> str:
        return self.verb.name

    @property
    def arity(self) -> int:
        return self.verb.arity

    @property
    def slots(self) -> tuple[frozenset[str], ...]:
        return self.verb.slots

    def accepts(self, slot: int, entity: EntityId, spec: GameSpec) -> bool:
        """Whether ``entity`` may fill ``slot``.

        ``thing`` admits any entity; otherwise the game object needs one of the listed
        properties, so entities unknown to the game never qualify.
        """
        rule = self.verb.slots[slot]
        if ANY_THING in rule:
            return True
        record = spec.objects.get(entity)
        return record is not None and not rule.isdisjoint(record.properties)


def templates_from_spec(spec: GameSpec) -> list[ActionTemplate]:
    return [ActionTemplate(verb) for verb in spec.verbs]


def generate_candidates(
    kg: KnowledgeGraph,
    templates: list[ActionTemplate],
    location: EntityId,
    spec: GameSpec,
) -> list[ActionCommand]:
    """Every slot filling the graph permits at ``location``, then the entity filter.

    Order is template order, then lexicographic arguments. Zero-arity templates always
    produce their command.
    """
    if not templates:
        msg = "at least one action template is required"
        raise ValueError(msg)

    pool = sorted(kg.near(location))
    commands: list[ActionCommand] = []
    for template in templates:
        if template.arity == 0:
            commands.append(make_command(template.verb, (), spec))
            continue
        fillers = [
            [entity for entity in pool if template.accepts(slot, entity, spec)]
            for slot in range(template.arity)
        ]
        for args in product(*fillers):
            if len(set(args)) != len(args):
                continue
            commands.append(make_command(template.verb, args, spec))
    return kg.filter_commands(commands)
