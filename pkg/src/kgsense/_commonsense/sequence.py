"""Additively smoothed n-gram scorer over command sequences, and top-k re-ranking."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from pathlib import Path
from typing import TYPE_CHECKING

import msgspec
import numpy as np

from .._engine.parser import normalize, parse_command
from .._logging import get_logger
from ..constants import BOS, EOS, OOV
from .tsv import read_text

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from .._types import Distribution
    from ..models import ActionCommand, GameSpec, ShapingConfig

logger = get_logger(__name__, "commonsense")


class SequenceModel(msgspec.Struct, frozen=True):
    """Counts of every n-gram over corpus commands, padded with begin and end markers.

    Each command is one token. P(w | h) = (c(h, w) + alpha) / (c(h) + alpha * |V|) where h is
    the last n-1 tokens.
    """

    order: int
    smoothing: float
    vocabulary: tuple[str, ...]
    counts: dict[tuple[str, ...], dict[str, int]]
    totals: dict[tuple[str, ...], int]
    known: frozenset[str] = frozenset()

    def token(self, command: str) -> str:
        return command if command in self.known else OOV

    def context(self, history: Sequence[str]) -> tuple[str, ...]:
        if self.order == 1:
            return ()
        padded = [BOS] * (self.order - 1) + [self.token(command) for command in history]
        return tuple(padded[-(self.order - 1) :])

    def probability(self, history: Sequence[str], command: str) -> float:
        context = self.context(history)
        seen = self.counts.get(context, {}).get(self.token(command), 0)
        total = self.totals.get(context, 0)
        return (seen + self.smoothing) / (total + self.smoothing * len(self.vocabulary))

    def log_probability(self, history: Sequence[str], command: str) -> float:
        return math.log(self.probability(history, command))

    def next_distribution(self, history: Sequence[str]) -> dict[str, float]:
        """The full conditional distribution over the vocabulary."""
        return {token: self.probability(history, token) for token in self.vocabulary}


def fit_sequence_model(
    corpus: Sequence[Sequence[str]], n: int = 2, alpha: float = 0.1
) -> SequenceModel:
    """Count the n-grams of every corpus sequence."""
    if n < 1:
        msg = f"n-gram order must be >= 1, got {n}"
        raise ValueError(msg)
    if alpha <= 0:
        msg = f"smoothing must be positive, got {alpha}"
        raise ValueError(msg)
    if not any(corpus):
        msg = "cannot fit a sequence model on an empty corpus"
        raise ValueError(msg)

    vocabulary = (*sorted({command for sequence in corpus for command in sequence}), EOS, OOV)
    counts: defaultdict[tuple[str, ...], Counter[str]] = defaultdict(Counter)
    for sequence in corpus:
        padded = [BOS] * (n - 1) + list(sequence) + [EOS]
        for i in range(n - 1, len(padded)):
            counts[tuple(padded[i - n + 1 : i])][padded[i]] += 1

    model = SequenceModel(
        order=n,
        smoothing=alpha,
        vocabulary=vocabulary,
        counts={context: dict(counter) for context, counter in counts.items()},
        totals={context: sum(counter.values()) for context, counter in counts.items()},
        known=frozenset(vocabulary),
    )
    logger.debug(
        f"Fitted {n}-gram model on {len(corpus)} sequences, vocabulary {len(vocabulary)}"
    )
    return model


def score_sequence(
    model: SequenceModel, history: Sequence[ActionCommand], candidate: ActionCommand
) -> float:
    """log P(candidate | last n-1 history commands)."""
    return model.log_probability([command.surface for command in history], candidate.surface)


def rerank(
    dist: Mapping[ActionCommand, float],
    model: SequenceModel,
    history: Sequence[ActionCommand],
    cfg: ShapingConfig,
) -> Distribution:
    """Blend the policy with the sequence model over the top-k candidates.

    Weights are exp((1 - blend) * log p + blend * score), renormalized over the top k; every
    other candidate gets 0. Ties at the cutoff go to the lexicographically smaller command.
    """
    ranked = sorted(dist, key=lambda command: (-dist[command], command.surface))
    top = ranked[: cfg.k]

    if cfg.blend == 0:
        total = sum(dist[command] for command in top)
        weights = {command: dist[command] / total for command in top}
    else:
        with np.errstate(divide="ignore"):
            policy = np.log(np.array([dist[command] for command in top], dtype=np.float64))
        scores = np.array([score_sequence(model, history, c) for c in top], dtype=np.float64)
        if cfg.blend == 1:
            # Support stays inside the policy's support
            logits = np.where(np.isneginf(policy), -np.inf, scores)
        else:
            logits = (1 - cfg.blend) * policy + cfg.blend * scores
        logits -= logits.max()
        raw = np.exp(logits)
        weights = dict(zip(top, (raw / raw.sum()).tolist(), strict=True))

    return {command: weights.get(command, 0.0) for command in dist}


# =============================================================================
# CORPUS
# =============================================================================


def parse_corpus(text: str, spec: GameSpec | None = None) -> list[list[str]]:
    """Blank-line separated sequences of one command per line.

    With ``spec``, commands are re-rendered in the form the agent produces them.
    """
    sequences: list[list[str]] = []
    current: list[str] = []
    for raw_line in [*text.splitlines(), ""]:
        line = raw_line.strip()
        if line.startswith("#"):
            continue
        if not line:
            if current:
                sequences.append(current)
                current = []
            continue
        command = parse_command(line, spec) if spec is not None else None
        current.append(command.surface if command is not None else normalize(line))
    return sequences


def load_corpus(path: str | Path, spec: GameSpec | None = None) -> list[list[str]]:
    corpus = parse_corpus(read_text(path), spec)
    logger.debug(f"Loaded {len(corpus)} command sequences from {Path(path).name}")
    return corpus
