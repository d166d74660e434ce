"""Constants and static configuration for kgsense."""

from __future__ import annotations

from pathlib import Path

# =============================================================================
# SHIPPED DATA
# =============================================================================

DATA_DIR = Path(__file__).parent / "data"

DEFAULT_GAME_SPEC = DATA_DIR / "nine05.spec"
DEFAULT_RULES = DATA_DIR / "extract.rules"
DEFAULT_HASA_KB = DATA_DIR / "hasa.tsv"
DEFAULT_FACTS = DATA_DIR / "facts.tsv"
DEFAULT_CORPUS = DATA_DIR / "corpus.txt"

# Environment switches
OUTPUT_DIR_ENV = "KGSENSE_OUTPUT_DIR"
DISABLE_CHECKPOINTS_ENV = "KGSENSE_DISABLE_CHECKPOINTS"

# =============================================================================
# WORLD ENGINE
# =============================================================================

# Reserved entity for the player character
PLAYER = "player"

# Words dropped when canonicalizing phrases and normalizing typed commands
ARTICLES = frozenset({"a", "an", "the", "some", "your"})

CHECKPOINT_NAMES = (
    "enter-bedroom",
    "enter-bathroom",
    "remove-watch",
    "remove-soiled-clothes",
    "drop-clothes",
    "enter-shower",
)
NUM_CHECKPOINTS = len(CHECKPOINT_NAMES)

# Inclusive bounds on the golden walkthrough length
WALKTHROUGH_BOUNDS = (25, 30)

TERMINAL_BONUS = 1
MAX_EPISODE_REWARD = NUM_CHECKPOINTS + TERMINAL_BONUS

DIRECTIONS = ("north", "south", "east", "west", "up", "down")

UNPARSED_TEXT = "I didn't understand that sentence."
DEFAULT_REFUSAL = "Nothing happens."

# Keyword -> argument kinds for the game-spec mini languages.
# "entity" accepts a slot index, an object id or the player; "target" an object id or
# the player; "place" a room, an object or the player.
CONDITION_ARGS = {
    "at": ("room",),
    "here": ("entity",),
    "held": ("entity",),
    "carried": ("entity",),
    "worn": ("entity",),
    "is": ("entity", "place"),
    "tagged": ("entity", "token"),
    "prop": ("entity", "token"),
    "exit": ("direction",),
    "naked": (),
}
EFFECT_ARGS = {
    "goto": ("room",),
    "walk": ("direction",),
    "take": ("entity",),
    "drop": ("entity",),
    "wear": ("entity",),
    "unwear": ("entity",),
    "place": ("entity", "entity"),
    "tag": ("entity", "token"),
    "untag": ("entity", "token"),
    "examine": ("entity",),
    "describe": (),
    "inventory": (),
    "finish": (),
}
TRIGGER_ARGS = {
    "enter": ("room",),
    "placed": ("target", "place"),
    "unworn": ("target",),
    "dropped": ("target",),
    "tagged": ("target", "token"),
}

# Slot filler rule that admits any entity
ANY_THING = "thing"

# =============================================================================
# BELIEF GRAPH AND COMMONSENSE
# =============================================================================

DEFAULT_HASH_WIDTH = 64

# Padding and fallback tokens of the command sequence model
BOS = "<s>"
EOS = "</s>"
OOV = "<unk>"

# Follow-up rounds of question answering about freshly proposed entities
QA_FOLLOWUP_DEPTH = 1

# =============================================================================
# AGENT AND HARNESS
# =============================================================================

VARIANTS = ("baseline", "hasa", "qa", "shaped")

DEFAULT_GAMMA = 0.95
DEFAULT_LEARNING_RATE = 0.01
DEFAULT_ENTROPY_COEF = 0.01
DEFAULT_VALUE_COEF = 0.5
DEFAULT_STEP_CAP = 60
# Per-update bound on the actor and critic gradient norms
DEFAULT_MAX_GRAD_NORM = 1.0
DEFAULT_EPISODES = 5000

# Wide enough that an untrained policy's ties do not cut the opening rooms' candidate lists
DEFAULT_TOP_K = 40
DEFAULT_BLEND = 0.5
DEFAULT_NGRAM_ORDER = 2
DEFAULT_SMOOTHING = 0.1

DEFAULT_WINDOW = 100
CONVERGENCE_THRESHOLD = 6

METRICS_HEADER = (
    "variant",
    "seed",
    "episode",
    "reward",
    "steps",
    "cp1",
    "cp2",
    "cp3",
    "cp4",
    "cp5",
    "cp6",
)

# Version of the policy checkpoint layout; bumped on incompatible changes
CHECKPOINT_FORMAT = (1, 0)
