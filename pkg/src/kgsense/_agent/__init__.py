"""Templated actions, the linear actor-critic and the four agent variants."""

from __future__ import annotations

from .actions import ActionTemplate, generate_candidates, templates_from_spec
from .policy import (
    FeatureSpace,
    NonFiniteGradientError,
    PolicyParameters,
    a2c_gradients,
    a2c_objectives,
    a2c_update,
    act,
    discounted_returns,
    policy_distribution,
)
from .runner import AgentContext, Trajectory, TrajectoryStep, cell_rng, run_episode, train

__all__ = (
    "ActionTemplate",
    "AgentContext",
    "FeatureSpace",
    "NonFiniteGradientError",
    "PolicyParameters",
    "Trajectory",
    "TrajectoryStep",
    "a2c_gradients",
    "a2c_objectives",
    "a2c_update",
    "act",
    "cell_rng",
    "discounted_returns",
    "generate_candidates",
    "policy_distribution",
    "run_episode",
    "templates_from_spec",
    "train",
)
