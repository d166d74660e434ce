"""Test configuration and fixtures for kgsense tests."""

from __future__ import annotations

import os

import pytest

from kgsense._agent.runner import AgentContext
from kgsense._commonsense.hasa import load_hasa
from kgsense._commonsense.qa import load_facts
from kgsense._commonsense.sequence import fit_sequence_model, load_corpus
from kgsense._engine.spec_loader import load_game
from kgsense.constants import (
    DEFAULT_CORPUS,
    DEFAULT_FACTS,
    DEFAULT_GAME_SPEC,
    DEFAULT_HASA_KB,
    DEFAULT_RULES,
    DISABLE_CHECKPOINTS_ENV,
    OUTPUT_DIR_ENV,
)
from kgsense.extractor import load_rules
from kgsense.models import ShapingConfig

RUN_SLOW_ENV = "KGSENSE_RUN_SLOW"


def pytest_collection_modifyitems(config, items):
    """Skip tests marked slow unless KGSENSE_RUN_SLOW=1."""
    if os.getenv(RUN_SLOW_ENV, "") in ("1", "true"):
        return
    skip_slow = pytest.mark.skip(reason=f"slow; set {RUN_SLOW_ENV}=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def isolate_outputs(monkeypatch, tmp_path):
    """Keep checkpoints off and experiment output inside the test's temp dir."""
    monkeypatch.setenv(DISABLE_CHECKPOINTS_ENV, "1")
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "runs"))


@pytest.fixture(scope="session")
def spec():
    """The shipped game spec."""
    return load_game(DEFAULT_GAME_SPEC)


@pytest.fixture(scope="session")
def rules(spec):
    return load_rules(DEFAULT_RULES, spec)


@pytest.fixture(scope="session")
def hasa_kb():
    return load_hasa(DEFAULT_HASA_KB)


@pytest.fixture(scope="session")
def facts():
    return load_facts(DEFAULT_FACTS)


@pytest.fixture(scope="session")
def sequence_model(spec):
    return fit_sequence_model(load_corpus(DEFAULT_CORPUS, spec), n=2, alpha=0.1)


@pytest.fixture
def context(spec, rules, hasa_kb, facts, sequence_model):
    """A fresh agent context with every commonsense provider loaded."""
    return AgentContext(
        spec,
        rules,
        hasa=hasa_kb,
        facts=facts,
        model=sequence_model,
        shaping=ShapingConfig(),
    )
