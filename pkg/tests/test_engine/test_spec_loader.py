"""Tests for loading and validating game spec files."""

from __future__ import annotations

import pytest

from kgsense._engine.spec_loader import GameSpecError, load_game
from kgsense.constants import DEFAULT_GAME_SPEC, NUM_CHECKPOINTS, PLAYER


@pytest.fixture
def spec_text():
    return DEFAULT_GAME_SPEC.read_text(encoding="utf-8")


def write_spec(tmp_path, text):
    path = tmp_path / "game.spec"
    path.write_text(text, encoding="utf-8")
    return path


class TestShippedSpec:
    """Test the shipped Nine-Oh-Five spec."""

    def test_rooms_and_start(self, spec):
        """Test the four rooms load and the game starts in bed."""
        assert set(spec.rooms) == {"bed_nook", "bedroom", "bathroom", "living_room"}
        assert spec.start == "bed_nook"

    def test_checkpoints_are_ordered(self, spec):
        """Test checkpoints compile in ordinal order."""
        assert [cp.ordinal for cp in spec.checkpoints] == list(range(1, NUM_CHECKPOINTS + 1))
        assert spec.checkpoints[2].trigger.op == "placed"
        assert spec.checkpoints[2].trigger.args == ("watch", "sink")

    def test_distractor_surface(self, spec):
        """Test the branching-factor surface has enough distractors."""
        assert len(spec.distractor_objects) >= 10
        assert len(spec.distractor_verbs) >= 8

    def test_noun_index_covers_player(self, spec):
        """Test the player nouns resolve to the player entity."""
        assert spec.nouns["me"] == (PLAYER,)
        assert spec.nouns["car keys"] == ("keys",)

    def test_ablation_section(self, spec):
        """Test the ablated room and synonym groups load."""
        assert spec.ablated_rooms == frozenset({"bathroom"})
        assert ("sink", "basin") in spec.ablated_nouns


class TestValidation:
    """Test load-time rejection of broken specs."""

    def test_missing_file(self, tmp_path):
        """Test a missing spec file is reported."""
        with pytest.raises(GameSpecError, match="Game spec not found"):
            load_game(tmp_path / "missing.spec")

    def test_dangling_exit(self, tmp_path, spec_text):
        """Test an exit to an undeclared room names the room."""
        text = spec_text.replace('exits = { west = "bedroom" }', 'exits = { west = "garage" }')
        with pytest.raises(GameSpecError, match="undeclared room 'garage'"):
            load_game(write_spec(tmp_path, text))

    def test_unknown_effect_keyword(self, tmp_path, spec_text):
        """Test an unknown effect keyword names the verb."""
        text = spec_text.replace('effects = ["tag player relieved"]', 'effects = ["teleport"]')
        with pytest.raises(GameSpecError, match=r"verb 'use': unknown keyword 'teleport'"):
            load_game(write_spec(tmp_path, text))

    def test_negated_effect(self, tmp_path, spec_text):
        """Test 'not' is rejected outside conditions."""
        text = spec_text.replace(
            'effects = ["tag player relieved"]', 'effects = ["not tag player relieved"]'
        )
        with pytest.raises(GameSpecError, match="only allowed in conditions"):
            load_game(write_spec(tmp_path, text))

    def test_wrong_argument_count(self, tmp_path, spec_text):
        """Test clause arity is checked."""
        text = spec_text.replace('trigger = "enter bedroom"', 'trigger = "enter"')
        with pytest.raises(GameSpecError, match="checkpoint 1"):
            load_game(write_spec(tmp_path, text))

    def test_unknown_field(self, tmp_path, spec_text):
        """Test unknown TOML fields are rejected by the schema."""
        text = spec_text.replace('start = "bed_nook"', 'start = "bed_nook"\nweather = "rain"')
        with pytest.raises(GameSpecError, match="weather"):
            load_game(write_spec(tmp_path, text))

    def test_short_walkthrough(self, tmp_path, spec_text):
        """Test walkthroughs outside the allowed length are rejected."""
        head, _, tail = spec_text.partition("commands = [")
        _, _, rest = tail.partition("]")
        text = f'{head}commands = ["get up", "go south"]{rest}'
        with pytest.raises(GameSpecError, match="walkthrough length 2"):
            load_game(write_spec(tmp_path, text))

    def test_nesting_cycle(self, tmp_path, spec_text):
        """Test objects cannot contain each other."""
        text = spec_text.replace(
            'id = "end_table"\nnouns = ["end table", "table", "nightstand"]\nlocation = "bedroom"',
            'id = "end_table"\nnouns = ["end table", "table", "nightstand"]\nlocation = "wallet"',
        )
        with pytest.raises(GameSpecError, match="nesting cycle"):
            load_game(write_spec(tmp_path, text))


class TestDistractorCount:
    """Test the branching-factor knob."""

    def test_count_keeps_listed_prefix(self, tmp_path, spec_text):
        """Test only the first count distractors are instantiated."""
        text = spec_text.replace("[distractors]\n", "[distractors]\ncount = 3\n")
        spec = load_game(write_spec(tmp_path, text))

        assert {"telephone", "wallet", "mirror"} <= set(spec.objects)
        assert "towel" not in spec.objects
        assert "newspaper" not in spec.objects
        assert spec.distractor_objects == ("telephone", "wallet", "mirror")
        # Non-distractor objects always stay
        assert {"keys", "sink", "front_door"} <= set(spec.objects)

    def test_dropped_holder_takes_its_contents(self, tmp_path, spec_text):
        """Test an unlisted object inside a dropped distractor is dropped with it."""
        text = spec_text.replace('    "remote",\n', "").replace(
            "[distractors]\n", "[distractors]\ncount = 5\n"
        )
        spec = load_game(write_spec(tmp_path, text))

        assert "sofa" not in spec.objects
        assert "remote" not in spec.objects
        assert "toothbrush" in spec.objects
        assert "sofa" not in spec.nouns.get("couch", ())

    def test_count_out_of_range(self, tmp_path, spec_text):
        """Test a count larger than the distractor list is rejected."""
        text = spec_text.replace("[distractors]\n", "[distractors]\ncount = 99\n")
        with pytest.raises(GameSpecError, match="count 99"):
            load_game(write_spec(tmp_path, text))
