from __future__ import annotations

import argparse
import logging
import sys

from .__version import __version__
from ._logging import get_logger, setup_colored_logging
from .constants import DEFAULT_GAME_SPEC, DEFAULT_WINDOW

logger = get_logger(__name__, "main")

_DESCRIPTION = """\
kgsense: commonsense-augmented knowledge-graph agents for a text adventure

Trains and compares four actor-critic agents on a slice-of-life morning game:
• baseline: belief graph built from observations only
• hasa: graph augmented with objects commonly found in each room
• qa: graph augmented with answers to questions about what it holds
• shaped: exploration re-ranked by a model of everyday command sequences

Experiment configs ship as exp1.toml (full observations) and exp2.toml
(bathroom fixtures removed from the room text)."""


def _add_spec_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--spec",
        type=str,
        default=str(DEFAULT_GAME_SPEC),
        help="Game spec file (default: the shipped Nine-Oh-Five morning)",
    )
    parser.add_argument(
        "--ablated",
        action="store_true",
        help="Render observations with the ablated room descriptions",
    )


def _train(args: argparse.Namespace) -> None:
    from pathlib import Path

    import msgspec

    from .harness import load_config, run_experiment

    cfg = load_config(args.config)
    if args.episodes is not None:
        cfg = msgspec.structs.replace(
            cfg, training=msgspec.structs.replace(cfg.training, episodes=args.episodes)
        )
    if args.workers is not None:
        cfg = msgspec.structs.replace(cfg, workers=args.workers)
    print(run_experiment(cfg, Path(args.config).parent))


def _aggregate(args: argparse.Namespace) -> None:
    from .harness import aggregate, convergence, write_table

    if args.convergence:
        table = convergence(args.input, args.window)
    else:
        table = aggregate(args.input, args.window)
    text = write_table(table, args.out)
    if args.out is None:
        sys.stdout.write(text)
    else:
        logger.info(f"Wrote {len(table)} rows to {args.out}")


def _walkthrough(args: argparse.Namespace) -> None:
    from ._engine.spec_loader import load_game
    from ._engine.world import run_walkthrough
    from .models import GameMode

    mode = GameMode.ABLATED if args.ablated else GameMode.FULL
    spec = load_game(args.spec)
    reward, steps = run_walkthrough(spec, mode)
    print(f"{spec.title} ({mode.value}): reward {reward} in {steps} steps")


def _play(args: argparse.Namespace) -> None:
    from .models import GameMode
    from .repl import repl

    repl(args.spec, GameMode.ABLATED if args.ablated else GameMode.FULL)


def main():
    """Main entry point for the kgsense command line."""
    parser = argparse.ArgumentParser(
        description=_DESCRIPTION,
        prog="kgsense",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        type=lambda s: str(s).upper(),
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Set the logging level (default: %(default)s)",
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Train subcommand
    train_parser = subparsers.add_parser(
        "train",
        help="Train every (variant, seed) cell of an experiment config",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    train_parser.add_argument(
        "--config", required=True, type=str, help="Experiment config (e.g. exp1.toml)"
    )
    train_parser.add_argument(
        "--episodes", type=int, help="Override the episode budget of every cell"
    )
    train_parser.add_argument("--workers", type=int, help="Override the worker process count")

    # Aggregate subcommand
    aggregate_parser = subparsers.add_parser(
        "aggregate",
        help="Smooth a metrics file into per-variant mean and max reward curves",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    aggregate_parser.add_argument(
        "--in", dest="input", required=True, type=str, help="metrics.csv written by train"
    )
    aggregate_parser.add_argument(
        "--window",
        type=int,
        default=DEFAULT_WINDOW,
        help="Moving-average window in episodes (default: %(default)s)",
    )
    aggregate_parser.add_argument("--out", type=str, help="Write the CSV here instead of stdout")
    aggregate_parser.add_argument(
        "--convergence",
        action="store_true",
        help="Report the first episode each (variant, seed) averages a reward of 6",
    )

    # Play subcommand
    play_parser = subparsers.add_parser(
        "play",
        help="Play the game interactively ('debug kg' shows the belief graph, 'quit' exits)",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    _add_spec_arguments(play_parser)

    # Walkthrough subcommand
    walkthrough_parser = subparsers.add_parser(
        "walkthrough",
        help="Replay the golden walkthrough and report its reward",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    _add_spec_arguments(walkthrough_parser)

    # Check subcommand
    check_parser = subparsers.add_parser(
        "check",
        help="Check game specs, rules, knowledge bases, corpora and experiment configs",
        formatter_class=argparse.RawTextHelpFormatter,
    )
    check_parser.add_argument(
        "files",
        nargs="*",
        type=str,
        help="Data files or directories to check (default: the shipped data files)",
    )

    args = parser.parse_args()

    # Require explicit subcommand
    if args.command is None:
        parser.error(
            "A subcommand is required. Use 'kgsense walkthrough' to try the game engine.\n"
            "See 'kgsense --help' for available commands."
        )

    # For check, default to WARNING instead of INFO unless --log-level was given
    if args.command == "check" and args.log_level == "INFO":
        log_level = logging.WARNING
    else:
        log_level = getattr(logging, args.log_level)
    setup_colored_logging(level=log_level)

    if args.command == "check":
        from ._check import run_check

        run_check(args.files)
        return

    from ._engine.world import WalkthroughError
    from .harness import ExperimentError

    handlers = {
        "train": _train,
        "aggregate": _aggregate,
        "walkthrough": _walkthrough,
        "play": _play,
    }
    try:
        handlers[args.command](args)
    except (ValueError, ExperimentError, WalkthroughError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(1)
    except KeyboardInterrupt:
        sys.exit(130)


if __name__ == "__main__":
    main()
