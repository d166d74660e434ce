"""Policy checkpoints: trained actor-critic weights stored as msgpack documents."""

from __future__ import annotations

import os
from pathlib import Path

import msgspec
import numpy as np
import platformdirs

from ._agent.policy import PolicyParameters
from ._logging import get_logger
from .constants import CHECKPOINT_FORMAT, DISABLE_CHECKPOINTS_ENV

logger = get_logger(__name__, "checkpoints")

# Little-endian float64, independent of the writing machine
_WIRE_DTYPE = np.dtype("<f8")


class CheckpointError(ValueError):
    """A checkpoint file is unreadable or does not match the expected layout."""


class CheckpointHeader(msgspec.Struct, frozen=True):
    format_version: tuple[int, int]
    feature_dim: int
    action_dim: int
    variant: str
    seed: int
    episodes: int


class PolicyCheckpoint(msgspec.Struct, frozen=True):
    header: CheckpointHeader
    actor: bytes
    critic: bytes


def default_checkpoint_dir() -> Path:
    return Path(platformdirs.user_data_dir("kgsense", "kgsense")) / "checkpoints"


def checkpoints_enabled() -> bool:
    return os.getenv(DISABLE_CHECKPOINTS_ENV, "").lower() not in ("1", "true")


class PolicyCheckpointStore:
    """Reads and writes ``<variant>-seed<seed>.msgpack`` files in one directory."""

    def __init__(self, directory: str | Path | None = None):
        self.directory = Path(directory) if directory is not None else default_checkpoint_dir()
        # Tests switch writing off through the environment
        self.enabled = checkpoints_enabled()

    def path(self, variant: str, seed: int) -> Path:
        return self.directory / f"{variant}-seed{seed}.msgpack"

    def save(
        self, params: PolicyParameters, variant: str, seed: int, episodes: int
    ) -> Path | None:
        """Write the parameters; returns None when checkpoints are disabled."""
        if not self.enabled:
            return None

        header = CheckpointHeader(
            format_version=CHECKPOINT_FORMAT,
            feature_dim=params.feature_dim,
            action_dim=params.action_dim,
            variant=variant,
            seed=seed,
            episodes=episodes,
        )
        document = PolicyCheckpoint(
            header=header,
            actor=params.actor.astype(_WIRE_DTYPE).tobytes(),
            critic=params.critic.astype(_WIRE_DTYPE).tobytes(),
        )
        path = self.path(variant, seed)
        self.directory.mkdir(parents=True, exist_ok=True)
        path.write_bytes(msgspec.msgpack.encode(document))
        logger.debug(f"Saved {variant} seed {seed} policy to {path}")
        return path

    def load(self, path: str | Path) -> tuple[CheckpointHeader, PolicyParameters]:
        """Read a checkpoint, checking its format version and array sizes."""
        path = Path(path)
        try:
            document = msgspec.msgpack.decode(path.read_bytes(), type=PolicyCheckpoint)
        except (msgspec.DecodeError, msgspec.ValidationError, OSError) as e:
            msg = f"Cannot read policy checkpoint {path}: {e}"
            raise CheckpointError(msg) from e

        header = document.header
        if tuple(header.format_version) != CHECKPOINT_FORMAT:
            msg = (
                f"{path}: checkpoint format {header.format_version} is not supported "
                f"(expected {CHECKPOINT_FORMAT})"
            )
            raise CheckpointError(msg)

        actor = np.frombuffer(document.actor, dtype=_WIRE_DTYPE)
        critic = np.frombuffer(document.critic, dtype=_WIRE_DTYPE)
        if actor.size != header.action_dim * header.feature_dim:
            shape = f"{header.action_dim}x{header.feature_dim}"
            msg = f"{path}: actor holds {actor.size} values, header says {shape}"
            raise CheckpointError(msg)
        if critic.size != header.feature_dim:
            msg = f"{path}: critic holds {critic.size} values, header says {header.feature_dim}"
            raise CheckpointError(msg)

        params = PolicyParameters(
            actor.reshape(header.action_dim, header.feature_dim).astype(np.float64),
            critic.astype(np.float64),
        )
        return header, params
