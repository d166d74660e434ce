"""Tests for typed-command parsing."""

from __future__ import annotations

import pytest

from kgsense._engine.parser import make_command, noun_for, normalize, parse_command
from kgsense._engine.spec_loader import load_game
from kgsense._engine.world import Game
from kgsense.constants import DEFAULT_GAME_SPEC, PLAYER
from kgsense.models import ActionCommand


class TestNormalize:
    """Test text normalization."""

    @pytest.mark.parametrize(
        ("text", "expected"),
        [
            ("Take THE keys!", "take keys"),
            ("  look   around ", "look around"),
            ("put your watch on a sink.", "put watch on sink"),
            ("...", ""),
        ],
    )
    def test_normalize(self, text, expected):
        """Test case, punctuation and articles are dropped."""
        assert normalize(text) == expected


class TestParseCommand:
    """Test matching text against verb templates."""

    def test_template(self, spec):
        """Test a plain template resolves its noun."""
        assert parse_command("take keys", spec) == ActionCommand("take", ("keys",), "take keys")

    def test_alias_renders_canonical_surface(self, spec):
        """Test an alias with a synonym renders as the canonical template."""
        command = parse_command("pick up the car keys", spec)

        assert command is not None
        assert command.verb == "take"
        assert command.surface == "take keys"

    def test_player_nouns(self, spec):
        """Test the player can be named."""
        command = parse_command("x me", spec)

        assert command == ActionCommand("examine", (PLAYER,), "examine me")

    def test_two_slot_verb(self, spec):
        """Test a two-argument template binds both slots in order."""
        command = parse_command("put wristwatch on basin", spec)

        assert command == ActionCommand("put_on", ("watch", "sink"), "put watch on sink")

    @pytest.mark.parametrize("text", ["dance", "", "take unicorn", "put watch on"])
    def test_unparsable(self, spec, text):
        """Test text matching no verb, or naming no object, parses to None."""
        assert parse_command(text, spec) is None

    def test_ambiguous_noun_prefers_reachable(self, tmp_path):
        """Test an ambiguous phrase resolves to something the player can reach."""
        text = DEFAULT_GAME_SPEC.read_text(encoding="utf-8").replace(
            '"cleaner clothing", "clothing"]', '"cleaner clothing", "clothing", "clothes"]'
        )
        path = tmp_path / "game.spec"
        path.write_text(text, encoding="utf-8")
        spec = load_game(path)
        assert spec.nouns["clothes"] == ("soiled_clothes", "clean_clothes")

        game = Game(spec)
        game.reset()
        for command in ("get up", "go south", "take off clothes", "drop clothes", "go north"):
            game.step(command)
        game.step("open dresser")

        assert parse_command("take clothes", spec).args == ("soiled_clothes",)
        assert parse_command("take clothes", spec, game.state).args == ("clean_clothes",)

    def test_zero_arity_aliases(self, spec):
        """Test short direction aliases."""
        assert parse_command("s", spec).verb == "go_south"
        assert parse_command("get out of bed", spec).verb == "get_up"


class TestRendering:
    """Test command surfaces built from verbs and ids."""

    def test_noun_for(self, spec):
        """Test entities render by their primary noun."""
        assert noun_for(PLAYER, spec) == "me"
        assert noun_for("soiled_clothes", spec) == "soiled clothes"
        assert noun_for("basin_water", spec) == "basin water"

    def test_make_command_round_trips(self, spec):
        """Test a rendered command parses back to itself."""
        verb = next(verb for verb in spec.verbs if verb.name == "put_on")
        command = make_command(verb, ("watch", "sink"), spec)

        assert command.surface == "put watch on sink"
        assert parse_command(command.surface, spec) == command
