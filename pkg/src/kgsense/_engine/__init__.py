"""Deterministic slice-of-life text adventure with ordered reward checkpoints."""

from __future__ import annotations

from .parser import make_command, normalize, parse_command, render_command
from .spec_loader import GameSpecError, compile_game, load_game
from .world import (
    Game,
    TerminalStateError,
    WalkthroughError,
    render,
    reset,
    run_walkthrough,
    step,
)

__all__ = (
    "Game",
    "GameSpecError",
    "TerminalStateError",
    "WalkthroughError",
    "compile_game",
    "load_game",
    "make_command",
    "normalize",
    "parse_command",
    "render",
    "render_command",
    "reset",
    "run_walkthrough",
    "step",
)
