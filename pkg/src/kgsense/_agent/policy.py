"""Linear advantage actor-critic over belief-graph features."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .._commonsense.sequence import rerank
from .._logging import get_logger
from ..constants import DEFAULT_HASH_WIDTH
from ..models import AgentVariant

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .._commonsense.sequence import SequenceModel
    from .._types import Distribution, FloatArray
    from ..graph import Vocabulary
    from ..models import ActionCommand, ShapingConfig, TrainingConfig
    from .runner import Trajectory

logger = get_logger(__name__, "agent")


class NonFiniteGradientError(FloatingPointError):
    """A policy update produced NaN or infinite values."""

    def __init__(self, step: int, what: str):
        self.step = step
        super().__init__(f"non-finite {what} gradient at trajectory step {step}")


@dataclass(frozen=True, slots=True, eq=False)
class PolicyParameters:
    """Actor matrix (action features x state features) and critic vector (state features)."""

    actor: FloatArray
    critic: FloatArray

    def __post_init__(self):
        if self.actor.ndim != 2 or self.critic.ndim != 1:
            shapes = f"{self.actor.shape}, {self.critic.shape}"
            msg = f"expected a matrix and a vector, got shapes {shapes}"
            raise ValueError(msg)
        if self.actor.shape[1] != self.critic.shape[0]:
            msg = f"actor {self.actor.shape} and critic {self.critic.shape} disagree on features"
            raise ValueError(msg)
        if not (np.all(np.isfinite(self.actor)) and np.all(np.isfinite(self.critic))):
            msg = "policy parameters must be finite"
            raise ValueError(msg)

    @classmethod
    def zeros(cls, action_dim: int, feature_dim: int) -> PolicyParameters:
        return cls(
            np.zeros((action_dim, feature_dim), dtype=np.float64),
            np.zeros(feature_dim, dtype=np.float64),
        )

    @property
    def action_dim(self) -> int:
        return self.actor.shape[0]

    @property
    def feature_dim(self) -> int:
        return self.actor.shape[1]

    def value(self, state_features: FloatArray) -> float:
        return float(self.critic @ state_features)


class FeatureSpace:
    """Dimensions of the state and action features for one experiment run.

    Action features are a one-hot block over the game's verbs followed by an
    entity-presence block over the vocabulary.
    """

    def __init__(
        self, verbs: Sequence[str], vocab: Vocabulary, width: int = DEFAULT_HASH_WIDTH
    ):
        self.verbs = tuple(verbs)
        self.vocab = vocab
        self.width = width
        self._verb_index = {verb: i for i, verb in enumerate(self.verbs)}
        self._rows: dict[ActionCommand, FloatArray] = {}

    @property
    def state_dim(self) -> int:
        return len(self.vocab) + self.width

    @property
    def action_dim(self) -> int:
        return len(self.verbs) + len(self.vocab)

    def initial_parameters(self) -> PolicyParameters:
        return PolicyParameters.zeros(self.action_dim, self.state_dim)

    def action_features(self, command: ActionCommand) -> FloatArray:
        row = self._rows.get(command)
        if row is None:
            row = np.zeros(self.action_dim, dtype=np.float64)
            if command.verb in self._verb_index:
                row[self._verb_index[command.verb]] = 1.0
            offset = len(self.verbs)
            for arg in command.args:
                if arg in self.vocab.index:
                    row[offset + self.vocab.index[arg]] = 1.0
            row.setflags(write=False)
            self._rows[command] = row
        return row

    def action_matrix(self, candidates: Sequence[ActionCommand]) -> FloatArray:
        return np.stack([self.action_features(command) for command in candidates])


def _log_softmax(logits: FloatArray) -> FloatArray:
    shifted = logits - logits.max()
    return shifted - np.log(np.exp(shifted).sum())


def policy_log_probs(
    params: PolicyParameters, state_features: FloatArray, action_matrix: FloatArray
) -> FloatArray:
    return _log_softmax(action_matrix @ (params.actor @ state_features))


def policy_distribution(
    params: PolicyParameters,
    space: FeatureSpace,
    state_features: FloatArray,
    candidates: Sequence[ActionCommand],
) -> Distribution:
    """Softmax over candidates of ``action_features(c) . actor . state_features``."""
    if not candidates:
        msg = "cannot build a policy over zero candidates"
        raise ValueError(msg)
    probs = np.exp(policy_log_probs(params, state_features, space.action_matrix(candidates)))
    return dict(zip(candidates, probs.tolist(), strict=True))


def act(
    variant: AgentVariant,
    params: PolicyParameters,
    space: FeatureSpace,
    state_features: FloatArray,
    candidates: Sequence[ActionCommand],
    history: Sequence[ActionCommand],
    rng: np.random.Generator,
    *,
    model: SequenceModel | None = None,
    shaping: ShapingConfig | None = None,
) -> tuple[ActionCommand, float]:
    """Sample a command; return it with its probability under the sampled-from distribution.

    The shaped variant samples from the re-ranked distribution; every other variant from
    the policy itself.
    """
    dist = policy_distribution(params, space, state_features, candidates)
    if variant is AgentVariant.SHAPED:
        if model is None or shaping is None:
            msg = "the shaped variant needs a sequence model and a shaping config"
            raise ValueError(msg)
        dist = rerank(dist, model, history, shaping)

    commands = list(dist)
    probs = np.fromiter(dist.values(), dtype=np.float64, count=len(commands))
    index = int(rng.choice(len(commands), p=probs / probs.sum()))
    return commands[index], float(probs[index])


# =============================================================================
# ADVANTAGE ACTOR-CRITIC
# =============================================================================


def discounted_returns(rewards: Sequence[float], gamma: float) -> FloatArray:
    """G_t = r_t + gamma * G_{t+1}, bootstrapping with 0 after the last step."""
    returns = np.zeros(len(rewards), dtype=np.float64)
    running = 0.0
    for t in reversed(range(len(rewards))):
        running = rewards[t] + gamma * running
        returns[t] = running
    return returns


def _state_matrix(trajectory: Trajectory) -> FloatArray:
    return np.stack([step.features for step in trajectory.steps])


def advantages(
    params: PolicyParameters, trajectory: Trajectory, cfg: TrainingConfig
) -> FloatArray:
    returns = discounted_returns(trajectory.rewards, cfg.gamma)
    return returns - _state_matrix(trajectory) @ params.critic


def a2c_objectives(
    params: PolicyParameters,
    trajectory: Trajectory,
    cfg: TrainingConfig,
    fixed_advantages: FloatArray | None = None,
) -> tuple[float, float]:
    """Actor objective (maximized) and critic loss (minimized).

    actor = sum_t A_t log pi(c_t) + entropy_coef * sum_t H(pi_t), with A_t held fixed;
    critic = value_coef * sum_t (G_t - V(s_t))^2.
    """
    if fixed_advantages is None:
        fixed_advantages = advantages(params, trajectory, cfg)
    returns = discounted_returns(trajectory.rewards, cfg.gamma)
    values = _state_matrix(trajectory) @ params.critic

    actor = 0.0
    for t, step in enumerate(trajectory.steps):
        log_probs = policy_log_probs(params, step.features, step.action_matrix)
        entropy = -float(np.exp(log_probs) @ log_probs)
        actor += fixed_advantages[t] * log_probs[step.chosen] + cfg.entropy_coef * entropy
    critic = cfg.value_coef * float(np.sum((returns - values) ** 2))
    return float(actor), critic


def a2c_gradients(
    params: PolicyParameters, trajectory: Trajectory, cfg: TrainingConfig
) -> tuple[FloatArray, FloatArray]:
    """Analytic gradients of ``a2c_objectives`` with respect to actor and critic weights."""
    if not trajectory.steps:
        msg = "cannot update from an empty trajectory"
        raise ValueError(msg)

    states = _state_matrix(trajectory)
    adv = advantages(params, trajectory, cfg)
    actor_grad = np.zeros_like(params.actor)
    for t, step in enumerate(trajectory.steps):
        phi = step.action_matrix
        log_probs = policy_log_probs(params, step.features, phi)
        probs = np.exp(log_probs)
        entropy = -float(probs @ log_probs)
        score = phi[step.chosen] - probs @ phi
        entropy_grad = phi.T @ (-probs * (log_probs + entropy))
        direction = adv[t] * score + cfg.entropy_coef * entropy_grad
        if not np.all(np.isfinite(direction)):
            raise NonFiniteGradientError(t, "actor")
        actor_grad += np.outer(direction, step.features)

    bad = ~np.isfinite(adv) | ~np.all(np.isfinite(states), axis=1)
    if bad.any():
        raise NonFiniteGradientError(int(np.argmax(bad)), "critic")
    critic_grad = -2.0 * cfg.value_coef * (adv @ states)
    return actor_grad, critic_grad


def clip_by_norm(grad: FloatArray, max_norm: float | None) -> FloatArray:
    """Rescale ``grad`` so its L2 norm is at most ``max_norm``."""
    if max_norm is None:
        return grad
    norm = float(np.linalg.norm(grad))
    return grad * (max_norm / norm) if norm > max_norm else grad


def a2c_update(
    params: PolicyParameters, trajectory: Trajectory, cfg: TrainingConfig
) -> PolicyParameters:
    """One learning-rate sized step: ascend the actor objective, descend the critic loss.

    Each gradient is clipped to ``cfg.max_grad_norm`` first, which bounds how far a single
    episode can move the parameters.
    """
    actor_grad, critic_grad = a2c_gradients(params, trajectory, cfg)
    actor_grad = clip_by_norm(actor_grad, cfg.max_grad_norm)
    critic_grad = clip_by_norm(critic_grad, cfg.max_grad_norm)
    logger.debug(
        f"A2C step over {len(trajectory.steps)} steps, episode reward {sum(trajectory.rewards)}"
    )
    actor = params.actor + cfg.learning_rate * actor_grad
    critic = params.critic - cfg.learning_rate * critic_grad
    if not np.all(np.isfinite(actor)):
        raise NonFiniteGradientError(len(trajectory.steps) - 1, "actor")
    if not np.all(np.isfinite(critic)):
        raise NonFiniteGradientError(len(trajectory.steps) - 1, "critic")
    return PolicyParameters(actor, critic)
