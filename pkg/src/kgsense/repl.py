"""Human-play loop over the engine, with a view of what the agents would believe."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import TYPE_CHECKING, TextIO

from ._agent.runner import AgentContext
from ._commonsense.hasa import load_hasa
from ._commonsense.qa import load_facts
from ._engine.spec_loader import load_game
from ._engine.world import Game
from ._logging import get_logger
from .constants import DEFAULT_FACTS, DEFAULT_HASA_KB, DEFAULT_RULES
from .extractor import load_rules
from .graph import KnowledgeGraph
from .models import AgentVariant, GameMode

if TYPE_CHECKING:
    from .models import Observation

logger = get_logger(__name__, "repl")

QUIT = "quit"
DEBUG_KG = "debug kg"
PROMPT = "> "


class Session:
    """One game plus the belief graph a commonsense agent would build while playing it.

    Observed triples come from the extractor. HasA and QA inferences are added once per
    visited room, the same way the agents add them.
    """

    def __init__(self, game: Game, context: AgentContext):
        self.game = game
        self.context = context
        self.kg = KnowledgeGraph()
        self._visited: set[str] = set()

    def start(self, seed: int = 0) -> str:
        self.kg = KnowledgeGraph()
        self._visited.clear()
        return self._show(self.game.reset(seed))

    def _observe(self, observation: Observation) -> None:
        location = observation.location_id
        self.kg = self.kg.update(self.context.extract(observation.text, location))
        if location not in self._visited:
            self._visited.add(location)
            for variant in (AgentVariant.HASA, AgentVariant.QA):
                self.kg = self.context.augment(variant, location, self.kg)

    def _show(self, observation: Observation) -> str:
        self._observe(observation)
        return f"{observation.text}\n[score {self.game.score}]"

    def handle(self, line: str) -> str | None:
        """Output for one input line; None once the player quits."""
        command = line.strip()
        if command.lower() == QUIT:
            return None
        if command.lower() == DEBUG_KG:
            return self.kg.dump() or "(empty belief graph)"
        if self.game.done:
            return f"The game is over. Type {QUIT!r} to leave.\n[score {self.game.score}]"
        return self._show(self.game.step(command))


def open_session(
    spec_path: str | Path,
    mode: GameMode = GameMode.FULL,
    *,
    rules_path: str | Path = DEFAULT_RULES,
    hasa_path: str | Path = DEFAULT_HASA_KB,
    facts_path: str | Path = DEFAULT_FACTS,
) -> Session:
    spec = load_game(spec_path)
    context = AgentContext(
        spec,
        load_rules(rules_path, spec),
        hasa=load_hasa(hasa_path),
        facts=load_facts(facts_path),
    )
    logger.debug(f"Playing {spec.title!r} ({mode.value})")
    return Session(Game(spec, mode), context)


def repl(
    spec_path: str | Path,
    mode: GameMode = GameMode.FULL,
    *,
    stdin: TextIO | None = None,
    stdout: TextIO | None = None,
) -> int:
    """Read one command per line until ``quit`` or end of input; returns the final score."""
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    session = open_session(spec_path, mode)
    interactive = hasattr(stdin, "isatty") and stdin.isatty()

    print(session.start(), file=stdout)
    while True:
        if interactive:
            print(PROMPT, end="", file=stdout, flush=True)
        line = stdin.readline()
        if not line:
            break
        output = session.handle(line)
        if output is None:
            break
        print(output, file=stdout, flush=True)
    return session.game.score
