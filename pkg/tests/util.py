"""Utility functions for tests."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pandas as pd

from kgsense._engine.parser import parse_command
from kgsense.constants import METRICS_HEADER, NUM_CHECKPOINTS

if TYPE_CHECKING:
    from collections.abc import Sequence

    from kgsense.models import ActionCommand, GameSpec


def walkthrough_commands(spec: GameSpec) -> list[ActionCommand]:
    """The golden walkthrough parsed into commands.

    Raises:
        AssertionError: If a walkthrough line does not parse
    """
    commands = []
    for text in spec.walkthrough:
        command = parse_command(text, spec)
        if command is None:
            msg = f"Walkthrough command {text!r} does not parse"
            raise AssertionError(msg)
        commands.append(command)
    return commands


def metrics_frame(rewards: dict[tuple[str, int], Sequence[int]]) -> pd.DataFrame:
    """A metrics table with one row per episode of each ``(variant, seed)`` cell."""
    rows = [
        [variant, seed, episode, reward, 10, *([None] * NUM_CHECKPOINTS)]
        for (variant, seed), cell in rewards.items()
        for episode, reward in enumerate(cell)
    ]
    return pd.DataFrame(rows, columns=list(METRICS_HEADER))
