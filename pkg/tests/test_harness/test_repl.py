"""Tests for the human-play loop."""

from __future__ import annotations

from io import StringIO

import pytest

from kgsense.constants import DEFAULT_GAME_SPEC, MAX_EPISODE_REWARD
from kgsense.models import GameMode
from kgsense.repl import open_session, repl


@pytest.fixture
def session():
    return open_session(DEFAULT_GAME_SPEC)


class TestSession:
    """Test one interactive session."""

    def test_start_shows_opening_and_score(self, session):
        """Test the opening text ends with the score line."""
        text = session.start()

        assert "You are lying in bed" in text
        assert text.endswith("[score 0]")

    def test_step_updates_score(self, session):
        """Test a rewarded command shows the new score."""
        session.start()
        assert session.handle("get up").endswith("[score 1]")

    def test_quit(self, session):
        """Test quit ends the session whatever the case."""
        session.start()
        assert session.handle("QUIT") is None

    def test_debug_kg(self, session):
        """Test the belief graph dump includes observed and inferred triples."""
        session.start()
        session.handle("get up")
        dump = session.handle("debug kg")

        assert "keys\tOn\tend_table\tObserved" in dump.splitlines()
        assert "bedroom\tHasA\tdresser\tInferredHasA" in dump.splitlines()

    def test_debug_kg_empty(self, session):
        """Test the dump before anything was observed."""
        assert session.handle("debug kg") == "(empty belief graph)"

    def test_game_over(self, session):
        """Test commands after the end only remind the player to quit."""
        session.start()
        for command in ("get up", "take keys", "go east", "open front door", "drive to work"):
            session.handle(command)

        assert session.handle("look").startswith("The game is over.")

    def test_ablated_session(self):
        """Test an ablated session never shows the bathroom fixtures."""
        session = open_session(DEFAULT_GAME_SPEC, GameMode.ABLATED)
        session.start()
        session.handle("get up")

        assert "sink" not in session.handle("go south").lower()


class TestRepl:
    """Test the read-eval-print loop over text streams."""

    def test_walkthrough_from_stdin(self, spec):
        """Test piping the walkthrough wins the game."""
        stdin = StringIO("\n".join(spec.walkthrough) + "\n")
        stdout = StringIO()

        score = repl(DEFAULT_GAME_SPEC, stdin=stdin, stdout=stdout)

        assert score == MAX_EPISODE_REWARD
        assert "*** You have won ***" in stdout.getvalue()
        assert "> " not in stdout.getvalue()

    def test_quit_stops_reading(self):
        """Test lines after quit are ignored."""
        stdin = StringIO("get up\nquit\ngo south\n")
        stdout = StringIO()

        assert repl(DEFAULT_GAME_SPEC, stdin=stdin, stdout=stdout) == 1
        assert "far from luxurious" not in stdout.getvalue()
