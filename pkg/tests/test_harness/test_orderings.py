"""Desk-scale runs of the shipped experiments and the variant orderings they should show.

Every test here trains all four variants over four seeds and is marked slow.
"""

from __future__ import annotations

import pytest

from kgsense.constants import DATA_DIR, DISABLE_CHECKPOINTS_ENV, OUTPUT_DIR_ENV
from kgsense.harness import aggregate, load_config, read_metrics, run_experiment

pytestmark = pytest.mark.slow

FINAL_EPISODES = 500


def run_shipped(name):
    """Metrics of the shipped experiment ``name``, written under the test's temp dir."""
    return read_metrics(run_experiment(load_config(DATA_DIR / f"{name}.toml")))


def best_per_seed(df, variant):
    return df[df["variant"] == variant].groupby("seed")["reward"].max()


def final_mean(df, variant):
    """Across-seed smoothed reward averaged over the last episodes of the run."""
    summary = aggregate(df)
    curve = summary[summary["variant"] == variant]
    return curve.nlargest(FINAL_EPISODES, "episode")["mean_reward"].mean()


@pytest.fixture(scope="module")
def monkeypatch_module():
    with pytest.MonkeyPatch.context() as mp:
        mp.setenv(DISABLE_CHECKPOINTS_ENV, "1")
        yield mp


@pytest.fixture(scope="module")
def exp1(tmp_path_factory, monkeypatch_module):
    monkeypatch_module.setenv(OUTPUT_DIR_ENV, str(tmp_path_factory.mktemp("exp1")))
    return run_shipped("exp1")


@pytest.fixture(scope="module")
def exp2(tmp_path_factory, monkeypatch_module):
    monkeypatch_module.setenv(OUTPUT_DIR_ENV, str(tmp_path_factory.mktemp("exp2")))
    return run_shipped("exp2")


class TestFullObservations:
    """Test the orderings with the full bathroom text."""

    @pytest.mark.parametrize("variant", ["hasa", "qa"])
    def test_commonsense_reaches_six(self, exp1, variant):
        """Test graph-augmented agents reach reward 6 in at least three of four seeds."""
        assert (best_per_seed(exp1, variant) >= 6).sum() >= 3

    def test_shaped_not_worse_than_baseline(self, exp1):
        """Test re-ranking does not hurt the late smoothed reward."""
        assert final_mean(exp1, "shaped") >= final_mean(exp1, "baseline")


class TestAblatedObservations:
    """Test the orderings when the bathroom fixtures are never mentioned."""

    @pytest.mark.parametrize("variant", ["hasa", "qa"])
    def test_commonsense_reaches_six(self, exp2, variant):
        """Test graph-augmented agents still reach reward 6 in at least three of four seeds."""
        assert (best_per_seed(exp2, variant) >= 6).sum() >= 3

    @pytest.mark.parametrize("variant", ["baseline", "shaped"])
    def test_text_only_agents_are_capped(self, exp2, variant):
        """Test agents without graph augmentation never pass reward 2 in any seed."""
        best = best_per_seed(exp2, variant)

        assert len(best) == 4
        assert (best <= 2).all()
