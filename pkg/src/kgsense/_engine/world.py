"""The deterministic world engine: reset, step, render and the golden walkthrough."""

from __future__ import annotations

import re
from functools import cache
from typing import TYPE_CHECKING

from msgspec.structs import replace

from .._logging import get_logger
from ..constants import PLAYER, TERMINAL_BONUS, UNPARSED_TEXT
from ..models import ActionCommand, GameMode, Observation, ObjectState, WorldState
from .conditions import all_hold, encloses, resolve, root_of, trigger_fired
from .parser import noun_for, parse_command

if TYPE_CHECKING:
    from collections.abc import Sequence

    from ..models import GameSpec, VerbRule

logger = get_logger(__name__, "engine")


class TerminalStateError(RuntimeError):
    """``step`` was called on a state that already ended the game."""


class WalkthroughError(RuntimeError):
    """The golden walkthrough does not play through cleanly."""

    def __init__(self, index: int, command: str, reason: str):
        self.index = index
        self.command = command
        self.reason = reason
        super().__init__(f"walkthrough command {index} ({command!r}): {reason}")


# =============================================================================
# TEXT HELPERS
# =============================================================================


def join_phrases(phrases: Sequence[str]) -> str:
    """``a``, ``a and b``, ``a, b and c``."""
    if len(phrases) <= 1:
        return "".join(phrases)
    return f"{', '.join(phrases[:-1])} and {phrases[-1]}"


def _verb_for(phrases: Sequence[str]) -> str:
    plural = len(phrases) > 1 or phrases[0].startswith("some ")
    return "are" if plural else "is"


@cache
def _ablation_pattern(nouns: tuple[tuple[str, ...], ...]) -> re.Pattern[str]:
    synonyms = sorted({noun for group in nouns for noun in group}, key=len, reverse=True)
    return re.compile(r"\b(?:" + "|".join(map(re.escape, synonyms)) + r")\b", re.IGNORECASE)


# =============================================================================
# RENDERING
# =============================================================================


def _mention_active(state: WorldState, spec: GameSpec, object_id: str, room_id: str) -> bool:
    record = spec.objects[object_id]
    if not record.mention or state.object_states[object_id].location != record.location:
        return False
    return root_of(state, spec, object_id)[0] == room_id


def room_lines(state: WorldState, spec: GameSpec, room_id: str) -> list[str]:
    """Full-mode description lines of a room in rendering order."""
    room = spec.rooms[room_id]
    lines = [line.strip() for line in room.description.splitlines() if line.strip()]
    mentioned = {
        object_id
        for object_id in spec.objects
        if _mention_active(state, spec, object_id, room_id)
    }
    lines.extend(
        spec.objects[object_id].mention for object_id in spec.objects if object_id in mentioned
    )
    if room.exits_text:
        lines.append(room.exits_text)

    visible = [
        object_id
        for object_id in spec.objects
        if root_of(state, spec, object_id) == (room_id, False)
    ]
    for holder_id in visible:
        holder = spec.objects[holder_id]
        if "surface" in holder.properties:
            preposition = "On"
        elif "container" in holder.properties:
            preposition = "In"
        else:
            continue
        if "openable" in holder.properties and "open" not in state.object_states[holder_id].tags:
            continue
        items = [
            spec.objects[object_id].display
            for object_id, object_state in state.object_states.items()
            if object_state.location == holder_id and object_id not in mentioned
        ]
        if items:
            listing = f"{_verb_for(items)} {join_phrases(items)}"
            lines.append(f"{preposition} {holder.definite} {listing}.")

    loose = [
        spec.objects[object_id].display
        for object_id, object_state in state.object_states.items()
        if object_state.location == room_id
        and object_id not in mentioned
        and "fixture" not in spec.objects[object_id].properties
    ]
    if loose:
        lines.append(f"You can also see {join_phrases(loose)} here.")

    for object_id in visible:
        record = spec.objects[object_id]
        lines.extend(
            record.tag_text[tag]
            for tag in sorted(state.object_states[object_id].tags)
            if tag in record.tag_text
        )
    return lines


def render(state: WorldState, spec: GameSpec, mode: GameMode) -> str:
    """Describe the player's current room.

    Ablated mode drops every line of an ablated room that names one of the ablated nouns;
    everything else is identical to full mode.
    """
    room_id = state.player_location
    lines = room_lines(state, spec, room_id)
    if mode is GameMode.ABLATED and room_id in spec.ablated_rooms and spec.ablated_nouns:
        pattern = _ablation_pattern(spec.ablated_nouns)
        lines = [line for line in lines if not pattern.search(line)]
    return "\n".join(lines) or spec.rooms[room_id].name


def _worn_and_held(state: WorldState, spec: GameSpec) -> tuple[list[str], list[str]]:
    worn, held = [], []
    for object_id, object_state in state.object_states.items():
        if object_state.location == PLAYER:
            (worn if object_state.worn else held).append(spec.objects[object_id].display)
    return worn, held


def inventory_text(state: WorldState, spec: GameSpec) -> str:
    worn, held = _worn_and_held(state, spec)
    text = f"You are carrying {join_phrases(held)}." if held else "You are empty-handed."
    if worn:
        text += f"\nYou are wearing {join_phrases(worn)}."
    return text


def examine_text(state: WorldState, spec: GameSpec, entity: str) -> str:
    if entity == PLAYER:
        worn, _ = _worn_and_held(state, spec)
        text = spec.player_description
        if worn:
            text += f"\nYou are wearing {join_phrases(worn)}."
        return text
    record = spec.objects[entity]
    return record.description or f"You see nothing special about {record.definite}."


# =============================================================================
# TRANSITIONS
# =============================================================================


def initial_state(spec: GameSpec, seed: int = 0) -> WorldState:
    return WorldState(
        player_location=spec.start,
        object_states={
            object_id: ObjectState(
                location=record.location, worn=record.worn, tags=frozenset(record.tags)
            )
            for object_id, record in spec.objects.items()
        },
        seed=seed,
    )


def reset(spec: GameSpec, mode: GameMode, seed: int = 0) -> tuple[WorldState, Observation]:
    """Start a fresh episode with the player in the start location."""
    state = initial_state(spec, seed)
    return state, Observation(text=render(state, spec, mode), location_id=state.player_location)


def _known(command: ActionCommand, spec: GameSpec) -> bool:
    try:
        verb = spec.verb(command.verb)
    except KeyError:
        return False
    return len(command.args) == verb.arity and all(
        arg == PLAYER or arg in spec.objects for arg in command.args
    )


def _nests_in_itself(rule: VerbRule, state: WorldState, bindings: Sequence[str]) -> bool:
    """Whether one of the rule's ``place`` effects would put an object inside itself."""
    for effect in rule.effects:
        if effect.op == "place":
            thing, holder = (resolve(arg, bindings) for arg in effect.args)
            if encloses(state, thing, holder):
                return True
    return False


def _no_op(state: WorldState, text: str) -> tuple[WorldState, Observation]:
    state = replace(state, step_count=state.step_count + 1)
    return state, Observation(text=text, location_id=state.player_location, failed=True)


def _apply(
    rule: VerbRule, state: WorldState, spec: GameSpec, mode: GameMode, bindings: Sequence[str]
) -> tuple[WorldState, list[str], int]:
    objects = dict(state.object_states)
    location = state.player_location
    player_tags = set(state.player_tags)
    terminal = False
    bonus = 0
    parts: list[str] = []

    def snapshot() -> WorldState:
        return replace(
            state,
            player_location=location,
            object_states=objects,
            player_tags=frozenset(player_tags),
            terminal=terminal,
        )

    def update(object_id: str, **changes) -> None:
        if object_id in objects:
            objects[object_id] = replace(objects[object_id], **changes)

    def retag(entity: str, tag: str, *, add: bool) -> None:
        if entity == PLAYER:
            tags = player_tags
            (tags.add if add else tags.discard)(tag)
        elif entity in objects:
            tags = set(objects[entity].tags)
            (tags.add if add else tags.discard)(tag)
            update(entity, tags=frozenset(tags))

    for effect in rule.effects:
        args = [resolve(arg, bindings) for arg in effect.args]
        match effect.op:
            case "goto":
                location = args[0]
            case "walk":
                location = spec.rooms[location].exits.get(args[0], location)
            case "take":
                update(args[0], location=PLAYER, worn=False)
            case "drop":
                update(args[0], location=location, worn=False)
            case "wear":
                update(args[0], location=PLAYER, worn=True)
            case "unwear":
                update(args[0], worn=False)
            case "place":
                update(args[0], location=args[1], worn=False)
            case "tag":
                retag(args[0], args[1], add=True)
            case "untag":
                retag(args[0], args[1], add=False)
            case "examine":
                parts.append(examine_text(snapshot(), spec, args[0]))
            case "describe":
                parts.append(render(snapshot(), spec, mode))
            case "inventory":
                parts.append(inventory_text(snapshot(), spec))
            case "finish":
                terminal = True
                won = all_hold(spec.goal, snapshot(), spec)
                bonus = TERMINAL_BONUS if won else 0
                parts.append(spec.win_text if won else spec.lose_text)
    return snapshot(), parts, bonus


def step(
    state: WorldState, spec: GameSpec, mode: GameMode, command: ActionCommand | str
) -> tuple[WorldState, Observation]:
    """Apply one command.

    The first verb rule whose conditions hold against ground truth is applied, so ablated
    objects stay usable. At most one checkpoint fires, and only the next one in order.
    """
    if state.terminal:
        msg = f"step called on a terminal state (step {state.step_count})"
        raise TerminalStateError(msg)

    if isinstance(command, str):
        parsed = parse_command(command, spec, state)
    else:
        parsed = command if _known(command, spec) else None
    if parsed is None:
        return _no_op(state, UNPARSED_TEXT)

    verb = spec.verb(parsed.verb)
    bindings = parsed.args
    nouns = [noun_for(arg, spec) for arg in bindings]
    rule = next((r for r in verb.rules if all_hold(r.requires, state, spec, bindings)), None)
    if rule is not None and not rule.refuse and _nests_in_itself(rule, state, bindings):
        rule = None
    if rule is None or rule.refuse:
        refusal = rule.text if rule is not None and rule.text else verb.refusal
        return _no_op(state, refusal.format(*nouns))

    next_state, parts, bonus = _apply(rule, state, spec, mode, bindings)
    if rule.text:
        parts.insert(0, rule.text.format(*nouns))

    mask = state.checkpoint_mask
    next_ordinal = state.checkpoints_reached + 1
    reward = 0
    out_of_order = []
    for checkpoint in spec.checkpoints:
        if state.has_checkpoint(checkpoint.ordinal):
            continue
        if not trigger_fired(checkpoint.trigger, state, next_state):
            continue
        if checkpoint.ordinal == next_ordinal:
            mask |= 1 << (checkpoint.ordinal - 1)
            reward = 1
            logger.debug(f"Checkpoint {checkpoint.ordinal} ({checkpoint.name}) reached")
        else:
            out_of_order.append(checkpoint.ordinal)

    next_state = replace(next_state, checkpoint_mask=mask, step_count=state.step_count + 1)
    observation = Observation(
        text="\n".join(part for part in parts if part) or "Done.",
        location_id=next_state.player_location,
        reward=reward + bonus,
        done=next_state.terminal,
        out_of_order=tuple(out_of_order),
    )
    return next_state, observation


# =============================================================================
# DRIVERS
# =============================================================================


def run_walkthrough(spec: GameSpec, mode: GameMode = GameMode.FULL) -> tuple[int, int]:
    """Play the golden walkthrough from reset; return (total reward, steps)."""
    state, _ = reset(spec, mode)
    total = 0
    commands = spec.walkthrough
    for index, text in enumerate(commands, start=1):
        if state.terminal:
            msg = "command after the game already ended"
            raise WalkthroughError(index, text, msg)
        command = parse_command(text, spec, state)
        if command is None:
            raise WalkthroughError(index, text, "not understood")
        state, observation = step(state, spec, mode, command)
        if observation.failed:
            raise WalkthroughError(index, text, f"refused: {observation.text}")
        if observation.out_of_order:
            msg = f"checkpoint {observation.out_of_order[0]} triggered out of order"
            raise WalkthroughError(index, text, msg)
        total += observation.reward

    if not state.terminal:
        raise WalkthroughError(len(commands), commands[-1], "walkthrough ended before the game")
    logger.info(f"Walkthrough ({mode.value}): reward {total} in {state.step_count} steps")
    return total, state.step_count


class Game:
    """A single game instance holding its current state.

    Example:
        >>> game = Game(load_game(DEFAULT_GAME_SPEC))
        >>> observation = game.reset(seed=0)
        >>> game.step("get up").reward
        1
    """

    def __init__(self, spec: GameSpec, mode: GameMode = GameMode.FULL):
        self.spec = spec
        self.mode = mode
        self._state: WorldState | None = None
        self.score = 0

    @property
    def state(self) -> WorldState:
        if self._state is None:
            msg = "Game.reset() must be called before use"
            raise RuntimeError(msg)
        return self._state

    @property
    def done(self) -> bool:
        return self.state.terminal

    def reset(self, seed: int = 0) -> Observation:
        self._state, observation = reset(self.spec, self.mode, seed)
        self.score = 0
        return observation

    def step(self, command: ActionCommand | str) -> Observation:
        self._state, observation = step(self.state, self.spec, self.mode, command)
        self.score += observation.reward
        return observation

    def render(self) -> str:
        return render(self.state, self.spec, self.mode)
