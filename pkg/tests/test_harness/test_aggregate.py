"""Tests for reading and aggregating metrics tables."""

from __future__ import annotations

import pandas as pd
import pytest

from kgsense.constants import METRICS_HEADER
from kgsense.harness import aggregate, convergence, read_metrics, write_table
from tests.util import metrics_frame


def write_frame(tmp_path, frame):
    path = tmp_path / "metrics.csv"
    frame.to_csv(path, index=False)
    return path


class TestAggregate:
    """Test per-variant learning curves."""

    def test_single_seed_window_one_is_identity(self):
        """Test one seed and window 1 reproduce the raw rewards."""
        rewards = [0, 2, 1, 7]
        table = aggregate(metrics_frame({("qa", 0): rewards}), window=1)

        assert list(table.columns) == ["variant", "episode", "mean_reward", "max_reward"]
        assert table["mean_reward"].tolist() == rewards
        assert table["max_reward"].tolist() == rewards

    def test_constant_rewards(self):
        """Test constant rewards give a flat curve whatever the window."""
        frame = metrics_frame({("hasa", seed): [2] * 5 for seed in range(3)})
        table = aggregate(frame, window=3)

        assert (table["mean_reward"] == 2).all()
        assert (table["max_reward"] == 2).all()

    def test_across_seeds(self):
        """Test mean and max are taken across seeds per episode."""
        frame = metrics_frame({("shaped", 0): [2, 2], ("shaped", 1): [6, 6]})
        table = aggregate(frame, window=1)

        assert table["mean_reward"].tolist() == [4.0, 4.0]
        assert table["max_reward"].tolist() == [6.0, 6.0]

    def test_moving_mean_warms_up(self):
        """Test early episodes average over what is available."""
        table = aggregate(metrics_frame({("baseline", 0): [0, 2, 4]}), window=2)

        assert table["mean_reward"].tolist() == pytest.approx([0.0, 1.0, 3.0])

    def test_variants_are_separate(self):
        """Test each variant gets its own rows, sorted by variant then episode."""
        frame = metrics_frame({("qa", 0): [1, 1], ("baseline", 0): [0, 0]})
        table = aggregate(frame, window=1)

        assert table["variant"].tolist() == ["baseline", "baseline", "qa", "qa"]
        assert table["episode"].tolist() == [0, 1, 0, 1]

    def test_mean_never_exceeds_max(self):
        """Test the mean curve stays under the max curve."""
        frame = metrics_frame(
            {("qa", 0): [0, 3, 5, 1, 7, 2], ("qa", 1): [1, 1, 0, 6, 6, 6], ("qa", 2): [7] * 6}
        )
        table = aggregate(frame, window=3)

        assert (table["mean_reward"] <= table["max_reward"] + 1e-12).all()

    def test_invalid_window(self):
        """Test the window must be positive."""
        with pytest.raises(ValueError, match="window"):
            aggregate(metrics_frame({("qa", 0): [1]}), window=0)

    def test_empty(self):
        """Test a header-only table aggregates to an empty table."""
        table = aggregate(pd.DataFrame(columns=list(METRICS_HEADER)))

        assert table.empty
        assert list(table.columns) == ["variant", "episode", "mean_reward", "max_reward"]

    def test_from_file(self, tmp_path):
        """Test aggregating straight from a metrics file."""
        path = write_frame(tmp_path, metrics_frame({("qa", 0): [1, 3]}))
        text = write_table(aggregate(path, window=2))

        assert text.splitlines() == [
            "variant,episode,mean_reward,max_reward",
            "qa,0,1.0,1.0",
            "qa,1,2.0,2.0",
        ]


class TestConvergence:
    """Test the first episode a full window reaches the threshold."""

    def test_reached_and_missed(self):
        """Test a cell that gets there and one that never does."""
        frame = metrics_frame({("qa", 0): [0, 6, 6, 7], ("qa", 1): [0, 0, 7, 0]})
        table = convergence(frame, window=2, threshold=6)

        assert table["episode"].dtype == "Int64"
        assert table.loc[0, "episode"] == 2
        assert pd.isna(table.loc[1, "episode"])

    def test_needs_a_full_window(self):
        """Test a lucky first episode does not count before the window fills."""
        table = convergence(metrics_frame({("qa", 0): [7, 0, 0]}), window=2, threshold=6)

        assert pd.isna(table.loc[0, "episode"])


class TestReadMetrics:
    """Test metrics file validation."""

    def test_rejects_repeated_rows(self, tmp_path):
        """Test a file holding the same cell twice is rejected."""
        frame = metrics_frame({("qa", 0): [1, 2]})
        path = write_frame(tmp_path, pd.concat([frame, frame]))

        with pytest.raises(ValueError, match="mixes several runs"):
            read_metrics(path)

    def test_rejects_ragged_cells(self, tmp_path):
        """Test cells with different episode counts are rejected."""
        path = write_frame(tmp_path, metrics_frame({("qa", 0): [1, 2], ("qa", 1): [1]}))

        with pytest.raises(ValueError, match="mixes runs"):
            read_metrics(path)

    def test_rejects_wrong_header(self, tmp_path):
        """Test a CSV that is not a metrics file is rejected."""
        path = tmp_path / "other.csv"
        path.write_text("a,b\n1,2\n", encoding="utf-8")

        with pytest.raises(ValueError, match="unexpected header"):
            read_metrics(path)

    def test_missing_file(self, tmp_path):
        """Test a missing metrics file."""
        with pytest.raises(ValueError, match="Metrics file not found"):
            read_metrics(tmp_path / "metrics.csv")
