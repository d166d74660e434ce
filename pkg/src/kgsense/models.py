"""Data models shared across the engine, the belief graph, the agents and the harness."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import msgspec

from .constants import (
    DEFAULT_BLEND,
    DEFAULT_ENTROPY_COEF,
    DEFAULT_EPISODES,
    DEFAULT_GAMMA,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MAX_GRAD_NORM,
    DEFAULT_NGRAM_ORDER,
    DEFAULT_REFUSAL,
    DEFAULT_SMOOTHING,
    DEFAULT_STEP_CAP,
    DEFAULT_TOP_K,
    DEFAULT_VALUE_COEF,
    MAX_EPISODE_REWARD,
    NUM_CHECKPOINTS,
    VARIANTS,
)

# =============================================================================
# ENUMERATIONS
# =============================================================================


class GameMode(str, Enum):
    """Rendering variant of the game; ablation never touches the world state."""

    FULL = "full"
    ABLATED = "ablated"


class RelationLabel(str, Enum):
    """Closed set of belief-graph relations; the value is the serialized form."""

    IN = "In"
    ON = "On"
    HAS = "Has"
    HAS_A = "HasA"
    EXIT_TO = "ExitTo"
    ATTRIBUTE_OF = "AttributeOf"
    WEARING = "Wearing"


class TripleSource(str, Enum):
    OBSERVED = "Observed"
    INFERRED_HASA = "InferredHasA"
    INFERRED_QA = "InferredQA"


class AgentVariant(str, Enum):
    BASELINE = "baseline"
    HASA = "hasa"
    QA = "qa"
    SHAPED = "shaped"

    @classmethod
    def _missing_(cls, value: object) -> AgentVariant | None:
        if isinstance(value, str):
            for member in cls:
                if member.value == value.lower():
                    return member
        return None

    @property
    def index(self) -> int:
        """Stable position used to derive per-cell random streams."""
        return VARIANTS.index(self.value)


# =============================================================================
# BELIEF ATOMS AND COMMANDS
# =============================================================================


@dataclass(frozen=True, slots=True)
class Triple:
    """One ``<subject, relation, object>`` belief; equality and hashing ignore ``source``."""

    subject: str
    relation: RelationLabel
    object: str
    source: TripleSource = field(default=TripleSource.OBSERVED, compare=False)

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.subject, self.relation.value, self.object)

    def with_source(self, source: TripleSource) -> Triple:
        return Triple(self.subject, self.relation, self.object, source)


class ActionCommand(msgspec.Struct, frozen=True):
    """A verb with up to two entity arguments and its rendered surface text."""

    verb: str
    args: tuple[str, ...] = ()
    surface: str = ""

    def __str__(self) -> str:
        return self.surface


# =============================================================================
# GAME SPEC FILE SCHEMA
# =============================================================================


class RoomRecord(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    id: str
    name: str
    description: str
    exits: dict[str, str] = msgspec.field(default_factory=dict)
    exits_text: str = ""


class ObjectRecord(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    id: str
    nouns: tuple[str, ...]
    location: str
    display: str
    properties: tuple[str, ...] = ()
    worn: bool = False
    mention: str = ""
    description: str = ""
    tags: tuple[str, ...] = ()
    tag_text: dict[str, str] = msgspec.field(default_factory=dict)

    @property
    def primary_noun(self) -> str:
        return self.nouns[0]

    @property
    def definite(self) -> str:
        return f"the {self.primary_noun}"


class VerbRuleRecord(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    requires: tuple[str, ...] = ()
    effects: tuple[str, ...] = ()
    text: str = ""
    refuse: bool = False


class VerbRecord(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    name: str
    template: str
    arity: int = 0
    slots: tuple[str, ...] = ()
    aliases: tuple[str, ...] = ()
    rules: tuple[VerbRuleRecord, ...] = ()
    refusal: str = DEFAULT_REFUSAL


class CheckpointRecord(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    ordinal: int
    name: str
    trigger: str


class GameSection(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    title: str
    start: str
    player_nouns: tuple[str, ...] = ("me", "myself", "yourself")
    player_description: str = "You look about as good as you feel."
    goal: tuple[str, ...] = ()
    win_text: str = "*** You have won ***"
    lose_text: str = "*** You have lost ***"


class WalkthroughSection(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    commands: tuple[str, ...]


class DistractorSection(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    objects: tuple[str, ...] = ()
    verbs: tuple[str, ...] = ()
    count: int | None = None


class AblationSection(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    rooms: tuple[str, ...] = ()
    nouns: tuple[tuple[str, ...], ...] = ()


class GameSpecFile(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    """Raw TOML document of a game spec, before cross-reference validation."""

    game: GameSection
    rooms: tuple[RoomRecord, ...]
    objects: tuple[ObjectRecord, ...]
    verbs: tuple[VerbRecord, ...]
    checkpoints: tuple[CheckpointRecord, ...]
    walkthrough: WalkthroughSection
    distractors: DistractorSection = msgspec.field(default_factory=DistractorSection)
    ablation: AblationSection = msgspec.field(default_factory=AblationSection)


# =============================================================================
# COMPILED GAME SPEC
# =============================================================================


class Clause(msgspec.Struct, frozen=True):
    """A parsed condition, effect or trigger: keyword plus arguments."""

    op: str
    args: tuple[str, ...] = ()
    negated: bool = False

    def __str__(self) -> str:
        text = " ".join((self.op, *self.args))
        return f"not {text}" if self.negated else text


class VerbRule(msgspec.Struct, frozen=True):
    requires: tuple[Clause, ...]
    effects: tuple[Clause, ...]
    text: str
    refuse: bool = False


class Verb(msgspec.Struct, frozen=True):
    name: str
    template: str
    arity: int
    slots: tuple[frozenset[str], ...]
    aliases: tuple[str, ...]
    rules: tuple[VerbRule, ...]
    refusal: str


class RewardCheckpoint(msgspec.Struct, frozen=True):
    ordinal: int
    name: str
    trigger: Clause


class GameSpec(msgspec.Struct, frozen=True):
    """A validated game: declared records plus compiled rules, keyed for lookup."""

    title: str
    start: str
    rooms: dict[str, RoomRecord]
    objects: dict[str, ObjectRecord]
    verbs: tuple[Verb, ...]
    checkpoints: tuple[RewardCheckpoint, ...]
    walkthrough: tuple[str, ...]
    player_nouns: tuple[str, ...]
    player_description: str
    goal: tuple[Clause, ...]
    win_text: str
    lose_text: str
    distractor_objects: tuple[str, ...] = ()
    distractor_verbs: tuple[str, ...] = ()
    ablated_rooms: frozenset[str] = frozenset()
    ablated_nouns: tuple[tuple[str, ...], ...] = ()
    # Normalized noun phrase -> entity ids, filled by the loader
    nouns: dict[str, tuple[str, ...]] = msgspec.field(default_factory=dict)

    def verb(self, name: str) -> Verb:
        for verb in self.verbs:
            if verb.name == name:
                return verb
        msg = f"Unknown verb: {name}"
        raise KeyError(msg)


# =============================================================================
# WORLD STATE
# =============================================================================


class ObjectState(msgspec.Struct, frozen=True):
    location: str
    worn: bool = False
    tags: frozenset[str] = frozenset()


class WorldState(msgspec.Struct, frozen=True):
    """Ground truth of one episode; updated by replacement, never in place."""

    player_location: str
    object_states: dict[str, ObjectState]
    player_tags: frozenset[str] = frozenset()
    checkpoint_mask: int = 0
    step_count: int = 0
    terminal: bool = False
    seed: int = 0

    @property
    def checkpoints_reached(self) -> int:
        return self.checkpoint_mask.bit_length()

    def has_checkpoint(self, ordinal: int) -> bool:
        return bool(self.checkpoint_mask >> (ordinal - 1) & 1)


class Observation(msgspec.Struct, frozen=True):
    text: str
    location_id: str
    reward: int = 0
    done: bool = False
    failed: bool = False
    out_of_order: tuple[int, ...] = ()


# =============================================================================
# CONFIGURATION
# =============================================================================


class TrainingConfig(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    gamma: float = DEFAULT_GAMMA
    learning_rate: float = DEFAULT_LEARNING_RATE
    entropy_coef: float = DEFAULT_ENTROPY_COEF
    value_coef: float = DEFAULT_VALUE_COEF
    step_cap: int = DEFAULT_STEP_CAP
    episodes: int = DEFAULT_EPISODES
    seed: int = 0
    # None disables clipping
    max_grad_norm: float | None = DEFAULT_MAX_GRAD_NORM

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            msg = f"gamma must be in (0, 1], got {self.gamma}"
            raise ValueError(msg)
        if self.learning_rate <= 0:
            msg = f"learning_rate must be positive, got {self.learning_rate}"
            raise ValueError(msg)
        if self.entropy_coef < 0 or self.value_coef < 0:
            msg = "entropy_coef and value_coef must be non-negative"
            raise ValueError(msg)
        if self.step_cap < 1 or self.episodes < 0:
            msg = f"step_cap must be >= 1 and episodes >= 0, got {self.step_cap}, {self.episodes}"
            raise ValueError(msg)
        if self.max_grad_norm is not None and self.max_grad_norm <= 0:
            msg = f"max_grad_norm must be positive, got {self.max_grad_norm}"
            raise ValueError(msg)


class ShapingConfig(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    """Top-k re-ranking settings plus the n-gram scorer it blends in."""

    k: int = DEFAULT_TOP_K
    blend: float = DEFAULT_BLEND
    order: int = DEFAULT_NGRAM_ORDER
    smoothing: float = DEFAULT_SMOOTHING

    def __post_init__(self):
        if self.k < 1:
            msg = f"k must be >= 1, got {self.k}"
            raise ValueError(msg)
        if not 0 <= self.blend <= 1:
            msg = f"blend must be in [0, 1], got {self.blend}"
            raise ValueError(msg)
        if self.order < 1 or self.smoothing <= 0:
            msg = f"order must be >= 1 and smoothing > 0, got {self.order}, {self.smoothing}"
            raise ValueError(msg)


class ExperimentConfig(msgspec.Struct, frozen=True, forbid_unknown_fields=True):
    name: str
    game: str = "nine05.spec"
    mode: GameMode = GameMode.FULL
    variants: tuple[AgentVariant, ...] = tuple(AgentVariant)
    seeds: tuple[int, ...] = (0, 1, 2, 3)
    rules: str = "extract.rules"
    hasa: str = "hasa.tsv"
    facts: str = "facts.tsv"
    corpus: str = "corpus.txt"
    output_dir: str | None = None
    workers: int = 1
    save_checkpoints: bool = True
    training: TrainingConfig = msgspec.field(default_factory=TrainingConfig)
    shaping: ShapingConfig = msgspec.field(default_factory=ShapingConfig)

    def __post_init__(self):
        if not self.seeds or len(set(self.seeds)) != len(self.seeds):
            msg = f"seeds must be non-empty and distinct, got {list(self.seeds)}"
            raise ValueError(msg)
        if not self.variants:
            msg = "at least one variant is required"
            raise ValueError(msg)
        if self.workers < 1:
            msg = f"workers must be >= 1, got {self.workers}"
            raise ValueError(msg)


class MetricsRow(msgspec.Struct, frozen=True):
    """One training episode of one (variant, seed) cell."""

    variant: str
    seed: int
    episode: int
    reward: int
    steps: int
    first_hits: tuple[int | None, ...] = (None,) * NUM_CHECKPOINTS

    def __post_init__(self):
        if not 0 <= self.reward <= MAX_EPISODE_REWARD:
            msg = f"reward {self.reward} outside [0, {MAX_EPISODE_REWARD}]"
            raise ValueError(msg)
        hits = [hit for hit in self.first_hits if hit is not None]
        if any(later <= earlier for earlier, later in zip(hits, hits[1:], strict=False)):
            msg = f"checkpoint first hits must increase with ordinal, got {self.first_hits}"
            raise ValueError(msg)

    def as_csv_row(self) -> list[str]:
        hits = ["" if hit is None else str(hit) for hit in self.first_hits]
        return [
            self.variant,
            str(self.seed),
            str(self.episode),
            str(self.reward),
            str(self.steps),
            *hits,
        ]
