"""Typed-command parsing and rendering against the declared verbs and object nouns."""

from __future__ import annotations

import re
from functools import cache
from typing import TYPE_CHECKING

from ..constants import ARTICLES, PLAYER
from ..models import ActionCommand
from .conditions import is_reachable

if TYPE_CHECKING:
    from ..models import GameSpec, Verb, WorldState

_re_punctuation = re.compile(r"[^\w\s{}]")
_re_slot = re.compile(r"\{(\d)\}")


def normalize(text: str) -> str:
    """Lower-case, drop punctuation and articles, collapse whitespace."""
    words = _re_punctuation.sub(" ", text.lower()).split()
    return " ".join(word for word in words if word not in ARTICLES)


@cache
def _pattern(template: str) -> re.Pattern[str]:
    parts = _re_slot.split(normalize(template))
    regex = ""
    for i, part in enumerate(parts):
        # Even positions are literal text, odd positions are slot indices
        regex += re.escape(part) if i % 2 == 0 else f"(?P<s{part}>.+?)"
    return re.compile(regex)


def noun_index(spec: GameSpec) -> dict[str, tuple[str, ...]]:
    """Normalized noun phrase -> entity ids declaring it, in declaration order."""
    index: dict[str, list[str]] = {}
    for noun in spec.player_nouns:
        index.setdefault(normalize(noun), []).append(PLAYER)
    for object_id, record in spec.objects.items():
        for noun in record.nouns:
            entities = index.setdefault(normalize(noun), [])
            if object_id not in entities:
                entities.append(object_id)
    return {noun: tuple(entities) for noun, entities in index.items()}


def _resolve_noun(
    phrase: str,
    nouns: dict[str, tuple[str, ...]],
    spec: GameSpec,
    state: WorldState | None,
) -> str | None:
    entities = nouns.get(phrase)
    if not entities:
        return None
    if state is not None and len(entities) > 1:
        for entity in entities:
            if is_reachable(state, spec, entity):
                return entity
    return entities[0]


def parse_command(
    text: str, spec: GameSpec, state: WorldState | None = None
) -> ActionCommand | None:
    """Match typed text against every verb template and alias in declared order.

    Ambiguous noun phrases prefer an entity the player can reach in ``state``.
    Returns None when nothing matches.
    """
    normalized = normalize(text)
    if not normalized:
        return None
    nouns = spec.nouns or noun_index(spec)

    for verb in spec.verbs:
        for template in (verb.template, *verb.aliases):
            match = _pattern(template).fullmatch(normalized)
            if match is None:
                continue
            args = []
            for slot in range(verb.arity):
                entity = _resolve_noun(match.group(f"s{slot}"), nouns, spec, state)
                if entity is None:
                    break
                args.append(entity)
            else:
                return ActionCommand(verb.name, tuple(args), render_command(verb, args, spec))
    return None


def noun_for(entity: str, spec: GameSpec) -> str:
    if entity == PLAYER:
        return spec.player_nouns[0]
    if entity not in spec.objects:
        # Entities only the belief graph knows about
        return entity.replace("_", " ")
    return spec.objects[entity].primary_noun


def render_command(verb: Verb, args: tuple[str, ...] | list[str], spec: GameSpec) -> str:
    return normalize(verb.template.format(*(noun_for(arg, spec) for arg in args)))


def make_command(verb: Verb, args: tuple[str, ...], spec: GameSpec) -> ActionCommand:
    return ActionCommand(verb.name, args, render_command(verb, args, spec))
