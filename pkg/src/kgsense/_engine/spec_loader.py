"""Loading and validating game spec files."""

from __future__ import annotations

import re
from pathlib import Path
from typing import TYPE_CHECKING

import msgspec

from .._logging import get_logger
from ..constants import (
    CHECKPOINT_NAMES,
    CONDITION_ARGS,
    EFFECT_ARGS,
    NUM_CHECKPOINTS,
    PLAYER,
    TRIGGER_ARGS,
    WALKTHROUGH_BOUNDS,
)
from ..models import GameSpec, GameSpecFile, RewardCheckpoint, Verb, VerbRule
from .conditions import compile_clause
from .parser import noun_index, normalize

if TYPE_CHECKING:
    from collections.abc import Mapping

    from ..models import Clause, ObjectRecord, VerbRecord

logger = get_logger(__name__, "engine")

_re_slot = re.compile(r"\{(\d)\}")


class GameSpecError(ValueError):
    """A game spec file is malformed or references something undeclared."""


def load_game(path: str | Path) -> GameSpec:
    """Decode a TOML game spec and validate every cross reference."""
    path = Path(path)
    if not path.is_file():
        msg = f"Game spec not found: {path}"
        raise GameSpecError(msg)

    try:
        raw = msgspec.toml.decode(path.read_bytes(), type=GameSpecFile)
    except (msgspec.DecodeError, msgspec.ValidationError) as e:
        msg = f"{path}: {e}"
        raise GameSpecError(msg) from e

    spec = compile_game(raw, source=str(path))
    logger.info(
        f"Loaded {spec.title!r} from {path.name}: {len(spec.rooms)} rooms, "
        f"{len(spec.objects)} objects, {len(spec.verbs)} verbs"
    )
    return spec


class _Compiler:
    """Validates one decoded spec file and compiles its clauses."""

    def __init__(self, raw: GameSpecFile, source: str):
        self.raw = raw
        self.source = source
        self.rooms = {room.id for room in raw.rooms}
        self.objects = {obj.id for obj in raw.objects}

    def fail(self, message: str) -> GameSpecError:
        return GameSpecError(f"{self.source}: {message}")

    def _arg_ok(self, arg: str, kind: str, arity: int) -> bool:
        match kind:
            case "room":
                return arg in self.rooms
            case "entity":
                if arg.isdigit():
                    return int(arg) < arity
                return arg in self.objects or arg == PLAYER
            case "target":
                return arg in self.objects or arg == PLAYER
            case "place":
                return arg in self.rooms or arg in self.objects or arg == PLAYER
        return True

    def clause(
        self,
        text: str,
        table: Mapping[str, tuple[str, ...]],
        *,
        where: str,
        arity: int = 0,
        negatable: bool = True,
    ) -> Clause:
        try:
            clause = compile_clause(text, table)
        except ValueError as e:
            raise self.fail(f"{where}: {e}") from e
        if clause.negated and not negatable:
            msg = f"{where}: 'not' is only allowed in conditions, got {text!r}"
            raise self.fail(msg)
        for arg, kind in zip(clause.args, table[clause.op], strict=True):
            if not self._arg_ok(arg, kind, arity):
                msg = f"{where}: {arg!r} is not a valid {kind} in {text!r}"
                raise self.fail(msg)
        return clause

    def check_ids(self) -> None:
        seen: set[str] = {PLAYER}
        for entity in [room.id for room in self.raw.rooms] + [obj.id for obj in self.raw.objects]:
            if entity in seen:
                msg = f"duplicate or reserved id {entity!r}"
                raise self.fail(msg)
            seen.add(entity)
        if self.raw.game.start not in self.rooms:
            msg = f"start room {self.raw.game.start!r} is not declared"
            raise self.fail(msg)

    def check_rooms(self) -> None:
        for room in self.raw.rooms:
            for direction, destination in room.exits.items():
                if destination not in self.rooms:
                    msg = (
                        f"room {room.id!r}: exit {direction!r} leads to undeclared room "
                        f"{destination!r}"
                    )
                    raise self.fail(msg)

    def check_objects(self) -> None:
        locations = {obj.id: obj.location for obj in self.raw.objects}
        for obj in self.raw.objects:
            if not obj.nouns:
                msg = f"object {obj.id!r} declares no nouns"
                raise self.fail(msg)
            if obj.location not in self.rooms | self.objects | {PLAYER}:
                msg = f"object {obj.id!r}: undeclared location {obj.location!r}"
                raise self.fail(msg)
            if obj.worn and obj.location != PLAYER:
                msg = f"object {obj.id!r} is worn but not located on {PLAYER!r}"
                raise self.fail(msg)

            chain = {obj.id}
            location = obj.location
            while location in locations:
                if location in chain:
                    msg = f"object {obj.id!r}: nesting cycle through {location!r}"
                    raise self.fail(msg)
                chain.add(location)
                location = locations[location]

    def verb(self, record: VerbRecord) -> Verb:
        where = f"verb {record.name!r}"
        if not 0 <= record.arity <= 2:
            msg = f"{where}: arity must be 0, 1 or 2, got {record.arity}"
            raise self.fail(msg)
        expected = {str(i) for i in range(record.arity)}
        for template in (record.template, *record.aliases):
            if set(_re_slot.findall(template)) != expected:
                msg = f"{where}: template {template!r} does not use exactly {record.arity} slot(s)"
                raise self.fail(msg)
        if len(record.slots) != record.arity:
            msg = f"{where}: {len(record.slots)} slot rule(s) for arity {record.arity}"
            raise self.fail(msg)

        rules = tuple(
            VerbRule(
                requires=tuple(
                    self.clause(text, CONDITION_ARGS, where=where, arity=record.arity)
                    for text in rule.requires
                ),
                effects=tuple(
                    self.clause(
                        text, EFFECT_ARGS, where=where, arity=record.arity, negatable=False
                    )
                    for text in rule.effects
                ),
                text=rule.text,
                refuse=rule.refuse,
            )
            for rule in record.rules
        )
        return Verb(
            name=record.name,
            template=record.template,
            arity=record.arity,
            slots=tuple(frozenset(slot.split("|")) for slot in record.slots),
            aliases=record.aliases,
            rules=rules,
            refusal=record.refusal,
        )

    def checkpoints(self) -> tuple[RewardCheckpoint, ...]:
        records = sorted(self.raw.checkpoints, key=lambda record: record.ordinal)
        ordinals = [record.ordinal for record in records]
        if ordinals != list(range(1, NUM_CHECKPOINTS + 1)):
            msg = f"checkpoint ordinals must be exactly 1..{NUM_CHECKPOINTS}, got {ordinals}"
            raise self.fail(msg)
        names = [record.name for record in records]
        unknown = sorted(set(names) - set(CHECKPOINT_NAMES))
        if unknown or len(set(names)) != len(names):
            allowed = list(CHECKPOINT_NAMES)
            msg = f"checkpoint names must be distinct members of {allowed}, got {names}"
            raise self.fail(msg)
        return tuple(
            RewardCheckpoint(
                ordinal=record.ordinal,
                name=record.name,
                trigger=self.clause(
                    record.trigger,
                    TRIGGER_ARGS,
                    where=f"checkpoint {record.ordinal}",
                    negatable=False,
                ),
            )
            for record in records
        )

    def kept_objects(self) -> dict[str, ObjectRecord]:
        """Objects left after applying the distractor count, in declared order."""
        distractors = self.raw.distractors
        dropped: set[str] = set()
        if distractors.count is not None:
            dropped = set(distractors.objects[distractors.count :])
        # Contents of a dropped holder go with it
        changed = True
        while changed:
            changed = False
            for obj in self.raw.objects:
                if obj.id not in dropped and obj.location in dropped:
                    dropped.add(obj.id)
                    changed = True
        if dropped:
            logger.debug(f"Distractor count drops {sorted(dropped)}")
        return {obj.id: obj for obj in self.raw.objects if obj.id not in dropped}

    def compile(self) -> GameSpec:
        raw = self.raw
        self.check_ids()
        self.check_rooms()
        self.check_objects()

        names = [verb.name for verb in raw.verbs]
        if len(set(names)) != len(names):
            msg = f"duplicate verb names in {names}"
            raise self.fail(msg)
        verbs = tuple(self.verb(record) for record in raw.verbs)
        checkpoints = self.checkpoints()
        goal = tuple(
            self.clause(text, CONDITION_ARGS, where="game goal") for text in raw.game.goal
        )

        low, high = WALKTHROUGH_BOUNDS
        length = len(raw.walkthrough.commands)
        if not low <= length <= high:
            msg = f"walkthrough length {length} outside [{low},{high}]"
            raise self.fail(msg)

        distractors = raw.distractors
        for object_id in distractors.objects:
            if object_id not in self.objects:
                msg = f"distractors: undeclared object {object_id!r}"
                raise self.fail(msg)
        for verb_name in distractors.verbs:
            if verb_name not in names:
                msg = f"distractors: undeclared verb {verb_name!r}"
                raise self.fail(msg)
        if distractors.count is not None and not 0 <= distractors.count <= len(
            distractors.objects
        ):
            msg = f"distractors: count {distractors.count} outside [0,{len(distractors.objects)}]"
            raise self.fail(msg)

        for room_id in raw.ablation.rooms:
            if room_id not in self.rooms:
                msg = f"ablation: undeclared room {room_id!r}"
                raise self.fail(msg)
        if any(not group for group in raw.ablation.nouns):
            msg = "ablation: empty synonym group"
            raise self.fail(msg)

        objects = self.kept_objects()
        spec = GameSpec(
            title=raw.game.title,
            start=raw.game.start,
            rooms={room.id: room for room in raw.rooms},
            objects=objects,
            verbs=verbs,
            checkpoints=checkpoints,
            walkthrough=raw.walkthrough.commands,
            player_nouns=raw.game.player_nouns,
            player_description=raw.game.player_description,
            goal=goal,
            win_text=raw.game.win_text,
            lose_text=raw.game.lose_text,
            distractor_objects=tuple(d for d in distractors.objects if d in objects),
            distractor_verbs=distractors.verbs,
            ablated_rooms=frozenset(raw.ablation.rooms),
            ablated_nouns=raw.ablation.nouns,
        )

        nouns = noun_index(spec)
        for object_id, record in objects.items():
            owners = nouns[normalize(record.primary_noun)]
            if owners != (object_id,):
                noun = record.primary_noun
                msg = f"object {object_id!r}: primary noun {noun!r} is shared with {list(owners)}"
                raise self.fail(msg)
        return msgspec.structs.replace(spec, nouns=nouns)


def compile_game(raw: GameSpecFile, source: str = "<memory>") -> GameSpec:
    """Validate a decoded spec file and compile its clauses into a GameSpec."""
    return _Compiler(raw, source).compile()
