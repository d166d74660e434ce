"""Rule-based extraction of belief triples from observation text."""

from __future__ import annotations

import re
from pathlib import Path
from typing import TYPE_CHECKING

import msgspec

from ._logging import get_logger
from .constants import ARTICLES, PLAYER
from .models import RelationLabel, Triple, TripleSource

if TYPE_CHECKING:
    from ._types import EntityId, Lexicon
    from .models import GameSpec

logger = get_logger(__name__, "extract")

_re_word = re.compile(r"[a-z0-9']+")
_re_sentence = re.compile(r"[.!?\n]+")
_re_items = re.compile(r"\s*,\s*(?:and\s+)?|\s+and\s+")
_re_template_slot = re.compile(r"\{(\w+)\}")

# Pattern kind -> slots its template must use
PATTERN_SLOTS = {
    "listing": frozenset({"holder", "items"}),
    "containment": frozenset({"holder", "items"}),
    "exit": frozenset({"room"}),
    "wearing": frozenset({"items"}),
    "carrying": frozenset({"items"}),
}


class RulesError(ValueError):
    """An extraction rules file is malformed or its lexicon is inconsistent."""


def canonicalize(phrase: str) -> EntityId:
    """Lower-case, drop articles and join the remaining words with underscores.

    Example:
        >>> canonicalize("the end table")
        'end_table'
    """
    words = [word for word in _re_word.findall(phrase.lower()) if word not in ARTICLES]
    if not words:
        msg = f"Empty entity phrase: {phrase!r}"
        raise ValueError(msg)
    return "_".join(words)


def _compile_template(template: str) -> re.Pattern[str]:
    parts = _re_template_slot.split(template.lower())
    last_slot = len(parts) - 2
    regex = r"\b"
    for i, part in enumerate(parts):
        if i % 2 == 0:
            regex += re.escape(part)
        elif part == "direction":
            regex += r"(?P<direction>[a-z]+)"
        else:
            # The final slot runs to the end of the sentence
            regex += f"(?P<{part}>.+)" if i == last_slot else f"(?P<{part}>.+?)"
    return re.compile(regex)


class ExtractionPattern(msgspec.Struct, frozen=True):
    kind: str
    template: str
    regex: re.Pattern[str]


class ExtractionRules(msgspec.Struct, frozen=True):
    """Ordered patterns plus the noun, room and pronoun lexicons."""

    patterns: tuple[ExtractionPattern, ...]
    lexicon: Lexicon
    rooms: Lexicon
    pronouns: frozenset[str] = frozenset()
    source: str = "<memory>"

    def lookup(self, phrase: str, table: Lexicon) -> EntityId | None:
        """Resolve a phrase, retrying on shorter trailing word runs."""
        try:
            words = canonicalize(phrase).split("_")
        except ValueError:
            return None
        for start in range(len(words)):
            key = "_".join(words[start:])
            if key in table:
                return table[key]
            if key in self.pronouns and table is self.lexicon:
                return PLAYER
        return None

    def missing_nouns(self, spec: GameSpec) -> list[str]:
        """Object noun phrases of ``spec`` the lexicon does not map to their object."""
        missing = []
        for object_id, record in spec.objects.items():
            missing.extend(
                noun for noun in record.nouns if self.lexicon.get(canonicalize(noun)) != object_id
            )
        return sorted(set(missing))

    def _default_spans(self) -> dict[str, EntityId | None]:
        spans: dict[str, EntityId | None] = dict(self.lexicon)
        # Room phrases and pronouns consume their words but yield nothing
        spans.update(dict.fromkeys(self.rooms))
        spans.update(dict.fromkeys(self.pronouns))
        return spans


def _split_items(items: str) -> list[str]:
    return [item for item in _re_items.split(items.strip()) if item]


def _default_triples(
    words: list[str], spans: dict[str, EntityId | None], longest: int, location: EntityId
) -> list[Triple]:
    triples = []
    i = 0
    while i < len(words):
        for length in range(min(longest, len(words) - i), 0, -1):
            key = "_".join(words[i : i + length])
            if key in spans:
                entity = spans[key]
                if entity is not None and entity != PLAYER:
                    triples.append(Triple(entity, RelationLabel.IN, location))
                i += length
                break
        else:
            i += 1
    return triples


def extract(text: str, location: EntityId, rules: ExtractionRules) -> list[Triple]:
    """Extract deduplicated Observed triples from one observation."""
    found: list[Triple] = []
    spans = rules._default_spans()
    longest = max((key.count("_") + 1 for key in spans), default=1)

    for sentence in _re_sentence.split(text.lower()):
        sentence = sentence.strip()
        if not sentence:
            continue
        for pattern in rules.patterns:
            match = pattern.regex.search(sentence)
            if match is None:
                continue
            found.extend(_pattern_triples(pattern.kind, match, location, rules))
        words = [word for word in _re_word.findall(sentence) if word not in ARTICLES]
        found.extend(_default_triples(words, spans, longest, location))

    return list(dict.fromkeys(found))


def _pattern_triples(
    kind: str, match: re.Match[str], location: EntityId, rules: ExtractionRules
) -> list[Triple]:
    groups = match.groupdict()
    if kind == "exit":
        room = rules.lookup(groups["room"], rules.rooms)
        return [] if room is None else [Triple(location, RelationLabel.EXIT_TO, room)]

    items = [rules.lookup(item, rules.lexicon) for item in _split_items(groups["items"])]
    items = [item for item in items if item is not None and item != PLAYER]
    if kind == "wearing":
        return [Triple(PLAYER, RelationLabel.WEARING, item) for item in items]
    if kind == "carrying":
        return [Triple(PLAYER, RelationLabel.HAS, item) for item in items]

    holder = rules.lookup(groups["holder"], rules.lexicon)
    if holder is None:
        return []
    relation = RelationLabel.ON if kind == "listing" else RelationLabel.IN
    return [Triple(item, relation, holder) for item in items if item != holder]


# =============================================================================
# RULES FILE
# =============================================================================


def parse_rules(text: str, source: str = "<memory>") -> ExtractionRules:
    patterns: list[ExtractionPattern] = []
    lexicon: dict[str, str] = {}
    rooms: dict[str, str] = {}
    pronouns: set[str] = set()

    def fail(lineno: int, message: str) -> RulesError:
        return RulesError(f"{source}:{lineno}: {message}")

    def add(table: dict[str, str], lineno: int, phrase: str, entity: str) -> None:
        try:
            key = canonicalize(phrase)
        except ValueError as e:
            raise fail(lineno, str(e)) from e
        for other in (lexicon, rooms):
            if other.get(key, entity) != entity:
                msg = f"{phrase!r} maps to both {other[key]!r} and {entity!r}"
                raise fail(lineno, msg)
        table[key] = entity

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        fields = [field.strip() for field in line.split("\t") if field.strip()]

        if fields[0].startswith("@"):
            kind = fields[0][1:]
            if kind in PATTERN_SLOTS:
                if len(fields) != 2:
                    raise fail(lineno, f"@{kind} takes one template")
                slots = set(_re_template_slot.findall(fields[1]))
                allowed = PATTERN_SLOTS[kind] | {"direction"}
                if not PATTERN_SLOTS[kind] <= slots or not slots <= allowed:
                    required = sorted(PATTERN_SLOTS[kind])
                    msg = f"@{kind} template must use {required}, got {sorted(slots)}"
                    raise fail(lineno, msg)
                patterns.append(ExtractionPattern(kind, fields[1], _compile_template(fields[1])))
            elif kind == "room":
                if len(fields) != 3:
                    raise fail(lineno, "@room takes a phrase and an entity id")
                add(rooms, lineno, fields[1], fields[2])
            elif kind == "pronoun":
                if len(fields) != 2:
                    raise fail(lineno, "@pronoun takes one phrase")
                try:
                    pronouns.add(canonicalize(fields[1]))
                except ValueError as e:
                    raise fail(lineno, str(e)) from e
            else:
                raise fail(lineno, f"unknown directive {fields[0]!r}")
            continue

        if len(fields) != 2:
            raise fail(lineno, f"expected 'noun<TAB>entity_id', got {raw_line!r}")
        noun, entity = fields
        if canonicalize(entity) != entity:
            raise fail(lineno, f"entity id {entity!r} is not canonical")
        add(lexicon, lineno, noun, entity)

    return ExtractionRules(
        patterns=tuple(patterns),
        lexicon=lexicon,
        rooms=rooms,
        pronouns=frozenset(pronouns),
        source=source,
    )


def load_rules(path: str | Path, spec: GameSpec | None = None) -> ExtractionRules:
    """Load an extraction rules file; with ``spec``, warn about uncovered object nouns."""
    path = Path(path)
    if not path.is_file():
        msg = f"Rules file not found: {path}"
        raise RulesError(msg)
    rules = parse_rules(path.read_text(encoding="utf-8"), source=str(path))
    logger.debug(
        f"Loaded {len(rules.patterns)} patterns and {len(rules.lexicon)} nouns from {path.name}"
    )
    if spec is not None and (missing := rules.missing_nouns(spec)):
        logger.warning(f"{path.name} has no lexicon entry for: {', '.join(missing)}")
    return rules
