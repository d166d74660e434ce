"""Compilation and evaluation of the game-spec condition, effect and trigger languages."""

from __future__ import annotations

from typing import TYPE_CHECKING

from ..constants import PLAYER
from ..models import Clause

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from ..models import GameSpec, WorldState


def compile_clause(text: str, table: Mapping[str, tuple[str, ...]]) -> Clause:
    """Parse ``"[not] keyword arg..."`` against a keyword table.

    Raises ValueError for an empty clause, an unknown keyword or a wrong argument count.
    Negation is only meaningful for conditions; callers reject it elsewhere.
    """
    tokens = text.split()
    negated = bool(tokens) and tokens[0] == "not"
    if negated:
        tokens = tokens[1:]
    if not tokens:
        msg = f"empty clause {text!r}"
        raise ValueError(msg)

    op, *args = tokens
    if op not in table:
        msg = f"unknown keyword {op!r} in {text!r}"
        raise ValueError(msg)
    if len(args) != len(table[op]):
        msg = f"{op!r} takes {len(table[op])} argument(s), got {len(args)} in {text!r}"
        raise ValueError(msg)
    return Clause(op=op, args=tuple(args), negated=negated)


def resolve(arg: str, bindings: Sequence[str]) -> str:
    """Map a slot index to its bound entity; other arguments are literal ids."""
    if arg.isdigit():
        return bindings[int(arg)]
    return arg


# =============================================================================
# WORLD QUERIES
# =============================================================================


def root_of(state: WorldState, spec: GameSpec, entity: str) -> tuple[str, bool]:
    """Follow an object's location chain to a room or the player.

    Returns the root and whether a closed openable container hides the object.
    """
    if entity == PLAYER:
        return PLAYER, False
    hidden = False
    location = state.object_states[entity].location
    while location in state.object_states:
        holder = state.object_states[location]
        if "openable" in spec.objects[location].properties and "open" not in holder.tags:
            hidden = True
        location = holder.location
    return location, hidden


def is_reachable(state: WorldState, spec: GameSpec, entity: str) -> bool:
    if entity == PLAYER:
        return True
    if entity not in state.object_states:
        return False
    root, hidden = root_of(state, spec, entity)
    return not hidden and root in (PLAYER, state.player_location)


def location_of(state: WorldState, entity: str) -> str | None:
    if entity == PLAYER:
        return state.player_location
    object_state = state.object_states.get(entity)
    return None if object_state is None else object_state.location


def tags_of(state: WorldState, entity: str) -> frozenset[str]:
    if entity == PLAYER:
        return state.player_tags
    object_state = state.object_states.get(entity)
    return frozenset() if object_state is None else object_state.tags


def is_worn(state: WorldState, entity: str) -> bool:
    object_state = state.object_states.get(entity)
    return object_state is not None and object_state.worn


def encloses(state: WorldState, outer: str, entity: str) -> bool:
    """Whether ``entity`` is the object ``outer`` or nested somewhere inside it."""
    while entity in state.object_states:
        if entity == outer:
            return True
        entity = state.object_states[entity].location
    return False


# =============================================================================
# EVALUATION
# =============================================================================


def holds(
    clause: Clause, state: WorldState, spec: GameSpec, bindings: Sequence[str] = ()
) -> bool:
    """Evaluate one condition against the ground-truth state."""
    args = [resolve(arg, bindings) for arg in clause.args]
    match clause.op:
        case "at":
            result = state.player_location == args[0]
        case "here":
            result = is_reachable(state, spec, args[0])
        case "held":
            result = location_of(state, args[0]) == PLAYER and not is_worn(state, args[0])
        case "carried":
            result = location_of(state, args[0]) == PLAYER
        case "worn":
            result = is_worn(state, args[0])
        case "is":
            result = location_of(state, args[0]) == args[1]
        case "tagged":
            result = args[1] in tags_of(state, args[0])
        case "prop":
            record = spec.objects.get(args[0])
            result = record is not None and args[1] in record.properties
        case "exit":
            result = args[0] in spec.rooms[state.player_location].exits
        case "naked":
            result = not any(obj.worn for obj in state.object_states.values())
        case _:
            msg = f"Unknown condition keyword: {clause.op}"
            raise ValueError(msg)
    return result != clause.negated


def all_hold(
    clauses: Sequence[Clause], state: WorldState, spec: GameSpec, bindings: Sequence[str] = ()
) -> bool:
    return all(holds(clause, state, spec, bindings) for clause in clauses)


def trigger_fired(trigger: Clause, previous: WorldState, current: WorldState) -> bool:
    """Whether a checkpoint trigger's transition happened between two states."""
    args = trigger.args
    match trigger.op:
        case "enter":
            return previous.player_location != args[0] and current.player_location == args[0]
        case "placed":
            before, after = location_of(previous, args[0]), location_of(current, args[0])
            return before != args[1] and after == args[1]
        case "unworn":
            return is_worn(previous, args[0]) and not is_worn(current, args[0])
        case "dropped":
            before, after = location_of(previous, args[0]), location_of(current, args[0])
            return before == PLAYER and after != PLAYER
        case "tagged":
            return args[1] not in tags_of(previous, args[0]) and args[1] in tags_of(
                current, args[0]
            )
    msg = f"Unknown trigger keyword: {trigger.op}"
    raise ValueError(msg)
