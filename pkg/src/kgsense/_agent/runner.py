"""The agent loop: observe, extract, augment, encode, act, step; and per-cell training."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .._commonsense.hasa import infer_hasa
from .._commonsense.qa import DEFAULT_QUESTIONS, qa_infer
from .._engine.world import Game
from .._logging import get_logger
from ..constants import DEFAULT_HASH_WIDTH, NUM_CHECKPOINTS
from ..extractor import extract
from ..graph import KnowledgeGraph, Vocabulary, encode
from ..models import AgentVariant, MetricsRow
from .actions import generate_candidates, templates_from_spec
from .policy import FeatureSpace, act, a2c_update

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from .._commonsense.hasa import HasAKnowledgeBase
    from .._commonsense.qa import FactBase, QuestionSet
    from .._commonsense.sequence import SequenceModel
    from .._types import CheckpointTimes, EntityId, FloatArray
    from ..extractor import ExtractionRules
    from ..models import ActionCommand, GameMode, GameSpec, ShapingConfig, TrainingConfig, Triple
    from .policy import PolicyParameters

logger = get_logger(__name__, "agent")


@dataclass(frozen=True, slots=True, eq=False)
class TrajectoryStep:
    features: FloatArray
    command: ActionCommand
    candidates: tuple[ActionCommand, ...]
    action_matrix: FloatArray
    chosen: int
    # Probability under the distribution the command was sampled from
    probability: float
    reward: int
    value: float


@dataclass(slots=True)
class Trajectory:
    steps: list[TrajectoryStep] = field(default_factory=list)

    @property
    def rewards(self) -> list[int]:
        return [step.reward for step in self.steps]

    @property
    def total_reward(self) -> int:
        return sum(self.rewards)

    def __len__(self) -> int:
        return len(self.steps)


class AgentContext:
    """Everything that stays fixed across the episodes of an experiment run.

    The vocabulary always covers both commonsense sources, so every variant shares the
    same feature dimensions.
    """

    def __init__(
        self,
        spec: GameSpec,
        rules: ExtractionRules,
        *,
        hasa: HasAKnowledgeBase | None = None,
        facts: FactBase | None = None,
        questions: QuestionSet = DEFAULT_QUESTIONS,
        model: SequenceModel | None = None,
        shaping: ShapingConfig | None = None,
        width: int = DEFAULT_HASH_WIDTH,
    ):
        self.spec = spec
        self.rules = rules
        self.hasa = hasa
        self.facts = facts
        self.questions = questions
        self.model = model
        self.shaping = shaping
        self.vocab = Vocabulary.build(spec, hasa, facts)
        self.space = FeatureSpace([verb.name for verb in spec.verbs], self.vocab, width)
        self.templates = templates_from_spec(spec)
        self._extractions: dict[tuple[str, str], list[Triple]] = {}

    def extract(self, text: str, location: EntityId) -> list[Triple]:
        key = (text, location)
        triples = self._extractions.get(key)
        if triples is None:
            triples = self._extractions[key] = extract(text, location, self.rules)
        return triples

    def augment(
        self, variant: AgentVariant, location: EntityId, kg: KnowledgeGraph
    ) -> KnowledgeGraph:
        """Add the variant's commonsense inferences about ``location``."""
        if variant is AgentVariant.HASA and self.hasa is not None:
            return kg.update(infer_hasa(self.hasa, location))
        if variant is AgentVariant.QA and self.facts is not None:
            return kg.update(qa_infer(self.facts, self.questions, location, kg))
        return kg

    def check_variant(self, variant: AgentVariant) -> None:
        missing = {
            AgentVariant.HASA: self.hasa is None,
            AgentVariant.QA: self.facts is None,
            AgentVariant.SHAPED: self.model is None or self.shaping is None,
        }.get(variant, False)
        if missing:
            msg = f"variant {variant.value!r} is missing its commonsense provider"
            raise ValueError(msg)


def run_episode(
    game: Game,
    variant: AgentVariant,
    params: PolicyParameters,
    cfg: TrainingConfig,
    rng: np.random.Generator,
    context: AgentContext,
    *,
    seed: int = 0,
    forced: Sequence[ActionCommand] | None = None,
) -> tuple[Trajectory, int, CheckpointTimes]:
    """Play one episode from a fresh reset.

    With ``forced``, the listed commands are played in order with probability 1 instead of
    sampling. Checkpoint times are 1-based step numbers of each first hit.
    """
    context.check_variant(variant)
    observation = game.reset(seed)
    kg = KnowledgeGraph()
    visited: set[str] = set()
    history: list[ActionCommand] = []
    trajectory = Trajectory()
    times: CheckpointTimes = {}
    total = 0

    candidates: list[ActionCommand] = []
    matrix = np.zeros((0, context.space.action_dim))
    matrix_for: tuple[KnowledgeGraph, str] | None = None
    for t in range(cfg.step_cap):
        if forced is not None and t >= len(forced):
            break
        location = observation.location_id
        kg = kg.update(context.extract(observation.text, location))
        if location not in visited:
            visited.add(location)
            kg = context.augment(variant, location, kg)

        features = encode(kg, observation.text, context.vocab, context.space.width)
        # update() returns the same graph when nothing was added
        if matrix_for is None or matrix_for[0] is not kg or matrix_for[1] != location:
            candidates = generate_candidates(kg, context.templates, location, context.spec)
            matrix = context.space.action_matrix(candidates)
            matrix_for = (kg, location)

        step_candidates, step_matrix = candidates, matrix
        if forced is not None:
            command, probability = forced[t], 1.0
            if command not in candidates:
                step_candidates = [*candidates, command]
                step_matrix = context.space.action_matrix(step_candidates)
        else:
            command, probability = act(
                variant,
                params,
                context.space,
                features,
                step_candidates,
                history,
                rng,
                model=context.model,
                shaping=context.shaping,
            )

        before = game.state.checkpoint_mask
        observation = game.step(command)
        fired = game.state.checkpoint_mask & ~before
        if fired:
            times[fired.bit_length()] = t + 1

        trajectory.steps.append(
            TrajectoryStep(
                features=features,
                command=command,
                candidates=tuple(step_candidates),
                action_matrix=step_matrix,
                chosen=step_candidates.index(command),
                probability=probability,
                reward=observation.reward,
                value=params.value(features),
            )
        )
        history.append(command)
        total += observation.reward
        if observation.done:
            break

    return trajectory, total, times


# =============================================================================
# TRAINING
# =============================================================================


def cell_rng(seed: int, variant: AgentVariant) -> np.random.Generator:
    """Independent random stream of one (variant, seed) cell."""
    return np.random.default_rng(np.random.SeedSequence([seed, variant.index]))


def train(
    context: AgentContext,
    mode: GameMode,
    variant: AgentVariant,
    cfg: TrainingConfig,
    *,
    on_episode: Callable[[MetricsRow], None] | None = None,
) -> tuple[PolicyParameters, list[MetricsRow]]:
    """Train one cell for ``cfg.episodes`` episodes from zero parameters.

    One A2C update follows each episode. Returns the final parameters and one metrics row
    per episode.
    """
    context.check_variant(variant)
    game = Game(context.spec, mode)
    params = context.space.initial_parameters()
    rng = cell_rng(cfg.seed, variant)
    rows: list[MetricsRow] = []

    for episode in range(cfg.episodes):
        trajectory, reward, times = run_episode(
            game, variant, params, cfg, rng, context, seed=episode
        )
        params = a2c_update(params, trajectory, cfg)
        row = MetricsRow(
            variant=variant.value,
            seed=cfg.seed,
            episode=episode,
            reward=reward,
            steps=len(trajectory),
            first_hits=tuple(times.get(ordinal) for ordinal in range(1, NUM_CHECKPOINTS + 1)),
        )
        rows.append(row)
        if on_episode is not None:
            on_episode(row)
        logger.debug(f"{variant.value} seed {cfg.seed} episode {episode}: reward {reward}")

    if rows:
        best = max(row.reward for row in rows)
        logger.info(f"{variant.value} seed {cfg.seed}: {len(rows)} episodes, best reward {best}")
    return params, rows
