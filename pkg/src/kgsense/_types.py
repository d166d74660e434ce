"""Centralized type definitions for kgsense."""

from __future__ import annotations

from typing import TYPE_CHECKING, TypeAlias, TypedDict

if TYPE_CHECKING:
    import numpy as np
    import numpy.typing as npt

    from kgsense.models import ActionCommand


# =============================================================================
# COMMON TYPE ALIASES
# =============================================================================

# Canonical lowercase entity token, e.g. "end_table"
EntityId: TypeAlias = str

# Dense float64 vectors and matrices used by the policy
FloatArray: TypeAlias = "npt.NDArray[np.float64]"

# Candidate command -> probability
Distribution: TypeAlias = "dict[ActionCommand, float]"

# Noun phrase -> entity id
Lexicon: TypeAlias = dict[str, str]

# Location entity -> objects commonly found there
HasAMap: TypeAlias = dict[str, frozenset[str]]

# 1-based checkpoint ordinal -> step index of its first hit
CheckpointTimes: TypeAlias = dict[int, int]


# =============================================================================
# TYPED DICT DEFINITIONS
# =============================================================================


class DiagnosticDict(TypedDict):
    """One finding of the ``check`` command, positioned in a data file."""

    line: int
    col: int
    end_col: int
    message: str
    code: str
    severity: str


class CellSummary(TypedDict):
    """What one (variant, seed) training cell reports back to the harness."""

    variant: str
    seed: int
    episodes: int
    best_reward: int
    final_mean: float
