"""Check command implementation for validating game, rule and knowledge files."""

from __future__ import annotations

import re
import sys
from pathlib import Path
from typing import TYPE_CHECKING

from ._commonsense.hasa import parse_hasa
from ._commonsense.qa import parse_facts
from ._commonsense.sequence import parse_corpus
from ._commonsense.tsv import KnowledgeBaseError
from ._engine.parser import parse_command
from ._engine.spec_loader import GameSpecError, load_game
from ._engine.world import WalkthroughError, run_walkthrough
from .constants import (
    DEFAULT_CORPUS,
    DEFAULT_FACTS,
    DEFAULT_GAME_SPEC,
    DEFAULT_HASA_KB,
    DEFAULT_RULES,
)
from .extractor import RulesError, parse_rules
from .harness import load_config, resolve_paths
from .models import GameMode

if TYPE_CHECKING:
    from ._types import DiagnosticDict
    from .models import GameSpec

CHECKED_SUFFIXES = (".spec", ".rules", ".tsv", ".txt", ".toml")
DEFAULT_FILES = (DEFAULT_GAME_SPEC, DEFAULT_RULES, DEFAULT_HASA_KB, DEFAULT_FACTS, DEFAULT_CORPUS)

_re_lineno = re.compile(r":(\d+): ")
_re_toml_position = re.compile(r"line (\d+), column (\d+)")
_re_quoted = re.compile(r"'([^']+)'")


def expand_paths(paths: list[str]) -> list[Path]:
    """Expand file and directory arguments into the data files to check.

    Directories are searched recursively for files with a checked suffix.
    """
    files: list[Path] = []

    for path_str in paths:
        path = Path(path_str)
        if not path.exists():
            print(f"Error: Path not found: {path_str}", file=sys.stderr)
            sys.exit(1)

        if path.is_file():
            if path.suffix in CHECKED_SUFFIXES:
                files.append(path)
            else:
                print(f"Error: Not a kgsense data file: {path_str}", file=sys.stderr)
                sys.exit(1)
        elif path.is_dir():
            files.extend(p for p in path.rglob("*") if p.suffix in CHECKED_SUFFIXES)
        else:
            print(f"Error: Invalid path: {path_str}", file=sys.stderr)
            sys.exit(1)

    return sorted(files)


def _diagnostic(
    line: int, col: int, end_col: int, message: str, code: str, severity: str = "error"
) -> DiagnosticDict:
    return {
        "line": line,
        "col": col,
        "end_col": end_col,
        "message": message,
        "code": code,
        "severity": severity,
    }


def _strip_source(message: str, source: str) -> str:
    prefix = f"{source}: "
    return message[len(prefix) :] if message.startswith(prefix) else message


def _at_line(content: str, message: str, source: str, code: str) -> DiagnosticDict:
    """Diagnostic for messages shaped ``source:lineno: text``."""
    match = _re_lineno.search(message)
    if match is None:
        return _diagnostic(0, 0, 1, _strip_source(message, source), code)
    line = int(match.group(1)) - 1
    text = message[match.end() :]
    lines = content.split("\n")
    width = len(lines[line].rstrip()) if line < len(lines) else 1
    return _diagnostic(line, 0, max(width, 1), text, code)


def _near_token(content: str, message: str, code: str) -> DiagnosticDict:
    """Point at the last quoted name of ``message`` that appears in the file."""
    position = _re_toml_position.search(message)
    if position is not None:
        line, col = int(position.group(1)) - 1, int(position.group(2)) - 1
        return _diagnostic(line, col, col + 1, message, code)

    lines = content.split("\n")
    for token in reversed(_re_quoted.findall(message)):
        for needle in (f'"{token}"', token):
            for i, text in enumerate(lines):
                if text.lstrip().startswith("#"):
                    continue
                col = text.find(needle)
                if col >= 0:
                    return _diagnostic(i, col, col + len(needle), message, code)
    return _diagnostic(0, 0, 1, message, code)


def _line_of(content: str, needle: str) -> tuple[int, int]:
    for i, text in enumerate(content.split("\n")):
        col = text.find(needle)
        if col >= 0:
            return i, col
    return 0, 0


# =============================================================================
# PER-FORMAT CHECKS
# =============================================================================


def _check_spec(path: Path, content: str) -> list[DiagnosticDict]:
    try:
        spec = load_game(path)
    except GameSpecError as e:
        return [_near_token(content, _strip_source(str(e), str(path)), "game-spec")]

    diagnostics = []
    for mode in GameMode:
        try:
            run_walkthrough(spec, mode)
        except WalkthroughError as e:
            line, col = _line_of(content, f'"{e.command}"')
            message = f"{mode.value} mode: {e}"
            end = col + len(e.command) + 2
            diagnostics.append(_diagnostic(line, col, end, message, "walkthrough"))
            break
    return diagnostics


def _check_rules(path: Path, content: str, spec: GameSpec | None) -> list[DiagnosticDict]:
    try:
        rules = parse_rules(content, source=str(path))
    except RulesError as e:
        return [_at_line(content, str(e), str(path), "rules")]
    if spec is None:
        return []
    return [
        _diagnostic(
            0, 0, 1, f"no lexicon entry for object noun {noun!r}", "uncovered-noun", "warning"
        )
        for noun in rules.missing_nouns(spec)
    ]


def _check_knowledge(path: Path, content: str) -> list[DiagnosticDict]:
    rows = [
        line.split("\t")
        for line in content.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    parser = parse_facts if rows and len(rows[0]) == 3 else parse_hasa
    try:
        parser(content, source=str(path))
    except KnowledgeBaseError as e:
        return [_at_line(content, str(e), str(path), "knowledge-base")]
    return []


def _check_corpus(content: str, spec: GameSpec | None) -> list[DiagnosticDict]:
    sequences = parse_corpus(content, spec)
    if not sequences:
        return [_diagnostic(0, 0, 1, "corpus holds no command sequences", "corpus")]
    if spec is None:
        return []

    diagnostics = []
    for i, raw_line in enumerate(content.split("\n")):
        line = raw_line.strip()
        if line and not line.startswith("#") and parse_command(line, spec) is None:
            col = raw_line.find(line)
            message = f"{line!r} is not a command of {spec.title!r}"
            diagnostics.append(
                _diagnostic(i, col, col + len(line), message, "unknown-command", "warning")
            )
    return diagnostics


def _check_config(path: Path, content: str) -> list[DiagnosticDict]:
    try:
        cfg = load_config(path)
        resolve_paths(cfg, path.parent)
    except ValueError as e:
        return [_near_token(content, _strip_source(str(e), str(path)), "config")]
    return []


def check_file(path: Path, content: str, spec: GameSpec | None = None) -> list[DiagnosticDict]:
    """Diagnostics for one data file; ``spec`` enables coverage warnings."""
    match path.suffix:
        case ".spec":
            return _check_spec(path, content)
        case ".rules":
            return _check_rules(path, content, spec)
        case ".tsv":
            return _check_knowledge(path, content)
        case ".txt":
            return _check_corpus(content, spec)
        case ".toml":
            return _check_config(path, content)
    msg = f"Unsupported data file: {path}"
    raise ValueError(msg)


def _reference_spec(files: list[Path]) -> GameSpec | None:
    """The first valid game spec among ``files``, else the shipped one."""
    for path in [*(p for p in files if p.suffix == ".spec"), DEFAULT_GAME_SPEC]:
        try:
            return load_game(path)
        except GameSpecError:
            continue
    return None


def run_check(files: list[str]) -> None:
    """Run check command on the provided files, or the shipped data files."""
    data_files = expand_paths(files) if files else list(DEFAULT_FILES)

    if not data_files:
        print("No data files found to check", file=sys.stderr)
        sys.exit(1)

    spec = _reference_spec(data_files)
    total_errors = 0
    total_warnings = 0
    all_diagnostics: list[tuple[str, str, DiagnosticDict]] = []

    for path in data_files:
        try:
            content = path.read_text(encoding="utf-8")
        except Exception as e:
            print(f"Error reading {path}: {e}", file=sys.stderr)
            sys.exit(1)

        for diagnostic in check_file(path, content, spec):
            all_diagnostics.append((str(path), content, diagnostic))
            if diagnostic["severity"] == "error":
                total_errors += 1
            else:
                total_warnings += 1

    if all_diagnostics:
        for file_path, content, diagnostic in all_diagnostics:
            print_diagnostic(file_path, content, diagnostic)

        print()
        print(
            f"Found {total_errors} error(s) and {total_warnings} warning(s) "
            f"in {len(data_files)} file(s)"
        )
        sys.exit(1 if total_errors > 0 else 0)
    else:
        print(f"No issues found in {len(data_files)} file(s)")
        sys.exit(0)


def print_diagnostic(file_path: str, content: str, diagnostic: DiagnosticDict) -> None:
    """Print a single diagnostic."""
    line = diagnostic["line"]  # 0-indexed
    col = diagnostic["col"]  # 0-indexed
    end_col = diagnostic["end_col"]
    message = diagnostic["message"]
    code = diagnostic["code"]
    severity = diagnostic["severity"]
    context = 2

    lines = content.split("\n")

    if hasattr(sys.stdout, "isatty") and sys.stdout.isatty():
        red = "\033[91m"
        yellow = "\033[93m"
        cyan = "\033[36m"
        dim = "\033[2m"
        reset = "\033[0m"
    else:
        red = yellow = cyan = dim = reset = ""

    error_color = yellow if severity == "warning" else red

    print(f"{error_color}{code}:{reset} {message}")
    print(f"  {cyan}-->{reset} {file_path}:{line + 1}:{col + 1}")

    padding_size = max(len(str(line + 1 + context)), 2) + 1
    print(" " * padding_size + cyan + dim + "|" + reset)

    for i in range(max(0, line - context), line):
        if i < len(lines):
            print(f"{dim}{i + 1:>2} {cyan}|{reset} {lines[i]}{reset}")

    if line < len(lines):
        line_content = lines[line]
        line_num_str = str(line + 1)
        print(f"{line_num_str:>2} {cyan}|{reset} {line_content}")

        # Line number field (min 2) + space + "|" + space
        padding = max(2, len(line_num_str)) + 3 + col
        underline_width = max(1, end_col - col)
        print(" " * padding + error_color + "^" * underline_width + reset)

    for i in range(line + 1, min(len(lines), line + context + 1)):
        print(f"{dim}{i + 1:>2} {cyan}|{reset} {lines[i]}{reset}")

    print(" " * padding_size + cyan + dim + "|" + reset)
    print()
