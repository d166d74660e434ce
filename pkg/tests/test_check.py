"""Tests for the per-file diagnostics behind the check command."""

from __future__ import annotations

from pathlib import Path

import pytest

from kgsense._check import check_file, expand_paths
from kgsense.constants import (
    DATA_DIR,
    DEFAULT_CORPUS,
    DEFAULT_FACTS,
    DEFAULT_GAME_SPEC,
    DEFAULT_HASA_KB,
    DEFAULT_RULES,
)


def check(path, spec=None):
    path = Path(path)
    return check_file(path, path.read_text(encoding="utf-8"), spec)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestShippedFiles:
    """Test the shipped data files are clean."""

    @pytest.mark.parametrize(
        "path",
        [DEFAULT_GAME_SPEC, DEFAULT_RULES, DEFAULT_HASA_KB, DEFAULT_FACTS, DATA_DIR / "exp1.toml"],
    )
    def test_no_errors(self, path, spec):
        """Test shipped files produce no diagnostics."""
        assert check(path, spec) == []

    def test_corpus_warns_about_unknown_commands(self, spec):
        """Test corpus commands the game cannot parse are warnings, not errors."""
        diagnostics = check(DEFAULT_CORPUS, spec)

        assert diagnostics
        assert {d["severity"] for d in diagnostics} == {"warning"}
        assert {d["code"] for d in diagnostics} == {"unknown-command"}
        assert any("'brush teeth'" in d["message"] for d in diagnostics)


class TestGameSpec:
    """Test game spec diagnostics."""

    def test_dangling_exit_points_at_room(self, tmp_path):
        """Test the diagnostic sits on the line naming the undeclared room."""
        text = DEFAULT_GAME_SPEC.read_text(encoding="utf-8").replace(
            'exits = { west = "bedroom" }', 'exits = { west = "garage" }'
        )
        path = write(tmp_path, "broken.spec", text)

        (diagnostic,) = check(path)
        assert diagnostic["code"] == "game-spec"
        assert diagnostic["severity"] == "error"
        assert "undeclared room 'garage'" in diagnostic["message"]
        assert '"garage"' in text.split("\n")[diagnostic["line"]]

    def test_broken_walkthrough(self, tmp_path):
        """Test a walkthrough that stalls is reported at the failing command."""
        text = DEFAULT_GAME_SPEC.read_text(encoding="utf-8").replace('    "open dresser",\n', "")
        path = write(tmp_path, "stalled.spec", text)

        (diagnostic,) = check(path)
        assert diagnostic["code"] == "walkthrough"
        assert diagnostic["message"].startswith("full mode:")
        assert '"take clean clothes"' in text.split("\n")[diagnostic["line"]]


class TestOtherFormats:
    """Test rules, knowledge base, corpus and config diagnostics."""

    def test_rules_error_line(self, tmp_path):
        """Test a bad rules line is reported on that line."""
        path = write(tmp_path, "bad.rules", "# header\nmug\tmug\n@verb\ttake {items}\n")

        (diagnostic,) = check(path)
        assert diagnostic["code"] == "rules"
        assert diagnostic["line"] == 2
        assert diagnostic["message"] == "unknown directive '@verb'"

    def test_uncovered_noun(self, tmp_path, spec):
        """Test lexicon gaps are warnings."""
        text = DEFAULT_RULES.read_text(encoding="utf-8").replace("wristwatch\twatch\n", "")
        path = write(tmp_path, "gap.rules", text)

        (diagnostic,) = check(path, spec)
        assert diagnostic["code"] == "uncovered-noun"
        assert diagnostic["severity"] == "warning"
        assert "'wristwatch'" in diagnostic["message"]

    def test_malformed_facts(self, tmp_path):
        """Test a short fact row is reported on its line."""
        path = write(tmp_path, "facts.tsv", "sink\tattribute\twater\nsink\twater\n")

        (diagnostic,) = check(path)
        assert diagnostic["code"] == "knowledge-base"
        assert diagnostic["line"] == 1

    def test_empty_corpus(self, tmp_path):
        """Test a corpus without sequences is an error."""
        path = write(tmp_path, "corpus.txt", "# nothing yet\n")

        (diagnostic,) = check(path)
        assert diagnostic["code"] == "corpus"
        assert diagnostic["severity"] == "error"

    def test_config_with_missing_data(self, tmp_path):
        """Test a config pointing at missing data files is an error."""
        path = write(tmp_path, "exp.toml", 'name = "bad"\ngame = "nope.spec"\n')

        (diagnostic,) = check(path)
        assert diagnostic["code"] == "config"
        assert "game=nope.spec" in diagnostic["message"]

    def test_unsupported_suffix(self, tmp_path):
        """Test files the checker does not know are refused."""
        with pytest.raises(ValueError, match="Unsupported data file"):
            check_file(tmp_path / "notes.md", "")


class TestExpandPaths:
    """Test file and directory expansion."""

    def test_directory(self):
        """Test a directory expands to every checked file inside, sorted."""
        files = expand_paths([str(DATA_DIR)])

        assert DEFAULT_GAME_SPEC in files
        assert DATA_DIR / "exp2.toml" in files
        assert files == sorted(files)

    def test_missing_path(self, tmp_path):
        """Test a missing path exits with an error."""
        with pytest.raises(SystemExit):
            expand_paths([str(tmp_path / "missing.spec")])
