"""Experiment orchestration: training cells, the metrics file and its aggregation."""

from __future__ import annotations

import csv
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import TYPE_CHECKING

import msgspec
import pandas as pd
import platformdirs

from ._agent.runner import AgentContext, train
from ._commonsense.hasa import load_hasa
from ._commonsense.qa import load_facts
from ._commonsense.sequence import fit_sequence_model, load_corpus
from ._engine.spec_loader import load_game
from ._logging import get_logger
from .checkpoints import PolicyCheckpointStore
from .constants import (
    CONVERGENCE_THRESHOLD,
    DATA_DIR,
    DEFAULT_WINDOW,
    METRICS_HEADER,
    OUTPUT_DIR_ENV,
)
from .extractor import load_rules
from .models import ExperimentConfig

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from ._types import CellSummary
    from .models import AgentVariant, MetricsRow

logger = get_logger(__name__, "harness")

METRICS_FILE = "metrics.csv"


class ExperimentError(RuntimeError):
    """A training cell failed; names the (variant, seed, episode) it failed in."""

    def __init__(self, variant: str, seed: int, episode: int, reason: str):
        # Positional args keep the error picklable across worker processes
        super().__init__(variant, seed, episode, reason)
        self.variant = variant
        self.seed = seed
        self.episode = episode
        self.reason = reason

    def __str__(self) -> str:
        return f"{self.variant} seed {self.seed} episode {self.episode}: {self.reason}"


# =============================================================================
# CONFIGURATION
# =============================================================================


class DataPaths(msgspec.Struct, frozen=True):
    """Data files of an experiment, resolved to existing paths."""

    game: Path
    rules: Path
    hasa: Path
    facts: Path
    corpus: Path


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        msg = f"Experiment config not found: {path}"
        raise ValueError(msg)
    try:
        return msgspec.toml.decode(path.read_bytes(), type=ExperimentConfig)
    except (msgspec.DecodeError, msgspec.ValidationError) as e:
        msg = f"{path}: {e}"
        raise ValueError(msg) from e


def resolve_data_path(name: str, base_dir: Path | None) -> Path | None:
    """Look next to the config first, then among the shipped data files."""
    candidate = Path(name)
    if candidate.is_absolute():
        return candidate if candidate.is_file() else None
    for directory in (base_dir, DATA_DIR):
        if directory is not None and (directory / candidate).is_file():
            return directory / candidate
    return None


def resolve_paths(cfg: ExperimentConfig, base_dir: Path | None = None) -> DataPaths:
    names = {
        "game": cfg.game,
        "rules": cfg.rules,
        "hasa": cfg.hasa,
        "facts": cfg.facts,
        "corpus": cfg.corpus,
    }
    resolved = {key: resolve_data_path(name, base_dir) for key, name in names.items()}
    missing = [f"{key}={names[key]}" for key, path in resolved.items() if path is None]
    if missing:
        msg = f"Experiment {cfg.name!r} references missing data files: {', '.join(missing)}"
        raise ValueError(msg)
    return DataPaths(**resolved)  # type: ignore[arg-type]


def output_dir(cfg: ExperimentConfig, base_dir: Path | None = None) -> Path:
    """The environment override, then the config's directory, then the user data dir."""
    if override := os.getenv(OUTPUT_DIR_ENV):
        return Path(override)
    if cfg.output_dir is not None:
        path = Path(cfg.output_dir)
        return path if path.is_absolute() or base_dir is None else base_dir / path
    return Path(platformdirs.user_data_dir("kgsense", "kgsense")) / "runs" / cfg.name


def build_context(cfg: ExperimentConfig, paths: DataPaths) -> AgentContext:
    spec = load_game(paths.game)
    model = fit_sequence_model(
        load_corpus(paths.corpus, spec), n=cfg.shaping.order, alpha=cfg.shaping.smoothing
    )
    return AgentContext(
        spec,
        load_rules(paths.rules, spec),
        hasa=load_hasa(paths.hasa),
        facts=load_facts(paths.facts),
        model=model,
        shaping=cfg.shaping,
    )


# =============================================================================
# RUNNING
# =============================================================================


def summarize(rows: Sequence[MetricsRow], window: int = DEFAULT_WINDOW) -> CellSummary:
    tail = [row.reward for row in rows[-window:]]
    return {
        "variant": rows[0].variant if rows else "",
        "seed": rows[0].seed if rows else 0,
        "episodes": len(rows),
        "best_reward": max((row.reward for row in rows), default=0),
        "final_mean": sum(tail) / len(tail) if tail else 0.0,
    }


def run_cell(
    cfg: ExperimentConfig,
    paths: DataPaths,
    variant: AgentVariant,
    seed: int,
    checkpoint_dir: Path | None = None,
    context: AgentContext | None = None,
) -> list[MetricsRow]:
    """Train one (variant, seed) cell; failures are reported with the episode they hit."""
    reached = 0

    def progress(row: MetricsRow) -> None:
        nonlocal reached
        reached = row.episode + 1

    training = msgspec.structs.replace(cfg.training, seed=seed)
    try:
        if context is None:
            context = build_context(cfg, paths)
        params, rows = train(context, cfg.mode, variant, training, on_episode=progress)
        if checkpoint_dir is not None:
            PolicyCheckpointStore(checkpoint_dir).save(params, variant.value, seed, len(rows))
    except Exception as e:
        raise ExperimentError(variant.value, seed, reached, f"{type(e).__name__}: {e}") from e

    summary = summarize(rows)
    logger.info(
        f"Cell {summary['variant']}/{summary['seed']}: best {summary['best_reward']}, "
        f"final mean {summary['final_mean']:.2f} over {summary['episodes']} episodes"
    )
    return rows


def _run_cell_job(
    job: tuple[ExperimentConfig, DataPaths, AgentVariant, int, Path | None],
) -> list[MetricsRow]:
    return run_cell(*job)


def write_metrics(path: Path, rows: Iterable[MetricsRow]) -> None:
    """Write through a sibling temp file so ``path`` is never left half-written."""
    partial = path.with_name(f".{path.name}.partial")
    try:
        with partial.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(METRICS_HEADER)
            writer.writerows(row.as_csv_row() for row in rows)
        os.replace(partial, path)
    except BaseException:
        partial.unlink(missing_ok=True)
        raise


def run_experiment(cfg: ExperimentConfig, base_dir: str | Path | None = None) -> Path:
    """Train every (variant, seed) cell and write ``metrics.csv``; returns its path.

    Cells run in worker processes when ``cfg.workers > 1``. Rows are merged in
    (variant, seed) order, so the file does not depend on the worker count.
    """
    base = Path(base_dir) if base_dir is not None else None
    paths = resolve_paths(cfg, base)
    out = output_dir(cfg, base)
    out.mkdir(parents=True, exist_ok=True)
    checkpoint_dir = out / "checkpoints" if cfg.save_checkpoints else None

    cells = [(variant, seed) for variant in cfg.variants for seed in cfg.seeds]
    logger.info(
        f"Experiment {cfg.name!r} ({cfg.mode.value}): {len(cells)} cells, "
        f"{cfg.training.episodes} episodes each, {cfg.workers} worker(s)"
    )

    if cfg.workers > 1 and len(cells) > 1:
        jobs = [(cfg, paths, variant, seed, checkpoint_dir) for variant, seed in cells]
        workers = min(cfg.workers, len(cells))
        spawn = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=spawn) as pool:
            buffers = list(pool.map(_run_cell_job, jobs))
    else:
        try:
            context = build_context(cfg, paths)
        except Exception as e:
            variant, seed = cells[0]
            raise ExperimentError(variant.value, seed, 0, f"{type(e).__name__}: {e}") from e
        buffers = [
            run_cell(cfg, paths, variant, seed, checkpoint_dir, context)
            for variant, seed in cells
        ]

    metrics = out / METRICS_FILE
    write_metrics(metrics, [row for buffer in buffers for row in buffer])
    logger.info(f"Wrote {metrics}")
    return metrics


# =============================================================================
# AGGREGATION
# =============================================================================


def read_metrics(path: str | Path) -> pd.DataFrame:
    """Load a metrics file, rejecting files that mix runs."""
    path = Path(path)
    if not path.is_file():
        msg = f"Metrics file not found: {path}"
        raise ValueError(msg)
    df = pd.read_csv(path, dtype={"variant": str})
    if tuple(df.columns) != METRICS_HEADER:
        msg = f"{path}: unexpected header {list(df.columns)}"
        raise ValueError(msg)

    if df.duplicated(["variant", "seed", "episode"]).any():
        msg = f"{path}: repeated (variant, seed, episode) rows; the file mixes several runs"
        raise ValueError(msg)
    lengths = df.groupby(["variant", "seed"])["episode"].agg(["count", "max"])
    if ((lengths["max"] + 1) != lengths["count"]).any() or lengths["count"].nunique() > 1:
        msg = f"{path}: cells have different or gapped episode ranges; the file mixes runs"
        raise ValueError(msg)
    return df


def _smoothed(df: pd.DataFrame, window: int, min_periods: int = 1) -> pd.Series:
    ordered = df.sort_values(["variant", "seed", "episode"])
    return ordered.groupby(["variant", "seed"])["reward"].transform(
        lambda rewards: rewards.rolling(window, min_periods=min_periods).mean()
    )


def aggregate(metrics: str | Path | pd.DataFrame, window: int = DEFAULT_WINDOW) -> pd.DataFrame:
    """Per variant and episode: the across-seed mean and max of each seed's moving mean.

    Columns are ``variant, episode, mean_reward, max_reward``.
    """
    if window < 1:
        msg = f"window must be >= 1, got {window}"
        raise ValueError(msg)
    df = metrics if isinstance(metrics, pd.DataFrame) else read_metrics(metrics)
    columns = ["variant", "episode", "mean_reward", "max_reward"]
    if df.empty:
        return pd.DataFrame(columns=columns)

    df = df.assign(smoothed=_smoothed(df, window))
    summary = (
        df.groupby(["variant", "episode"], sort=True)["smoothed"]
        .agg(mean_reward="mean", max_reward="max")
        .reset_index()
    )
    return summary[columns]


def convergence(
    metrics: str | Path | pd.DataFrame,
    window: int = DEFAULT_WINDOW,
    threshold: float = CONVERGENCE_THRESHOLD,
) -> pd.DataFrame:
    """First episode whose full-window moving mean reaches ``threshold``, per variant and seed.

    Cells that never get there have an empty ``episode``.
    """
    if window < 1:
        msg = f"window must be >= 1, got {window}"
        raise ValueError(msg)
    df = metrics if isinstance(metrics, pd.DataFrame) else read_metrics(metrics)
    columns = ["variant", "seed", "episode"]
    if df.empty:
        return pd.DataFrame(columns=columns)

    df = df.assign(smoothed=_smoothed(df, window, min_periods=window))
    records = []
    for (variant, seed), cell in df.groupby(["variant", "seed"], sort=True):
        reached = cell.loc[cell["smoothed"] >= threshold, "episode"]
        records.append(
            {
                "variant": variant,
                "seed": seed,
                "episode": int(reached.min()) if not reached.empty else None,
            }
        )
    result = pd.DataFrame.from_records(records, columns=columns)
    result["episode"] = result["episode"].astype("Int64")
    return result


def write_table(table: pd.DataFrame, path: str | Path | None = None) -> str:
    """CSV text of ``table``; also written to ``path`` when given."""
    text = table.to_csv(index=False, lineterminator="\n")
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text
