"""Harsanyi-transformed games and the H-CFR solve.

:func:`transform` prepends a chance root whose single move draws every
uncertain payoff symbol at once. No strategic player observes that draw, so
information sets are exactly those of the wrapped game, and scenario values
are only consulted when a terminal is scored: the per-scenario copies of the
tree never exist.

The root has a continuum of outcomes. CFR therefore samples it: each
iteration draws one scenario (or a batch of ``scenarios_per_iteration``
averaged together) and walks the rest of the tree exhaustively. Exact
evaluators instead see a single root outcome, the expected scenario, which is
the risk-neutral value whenever utilities are affine in the payoff symbols.
"""

from __future__ import annotations

import math
from typing import Any, Sequence

import numpy as np

from .cfr import CFRConfig, CFRSolver, SolveResult
from .distributions import PayoffModel, sample_scenario, scenario_means
from .game import ActionId, Game, History, InfoKey, PlayerRole


class HarsanyiError(ValueError):
    pass


class ScenarioDraw:
    """Outcome of the payoff root: a ``(K, num_symbols)`` batch of scenarios.

    Compared by identity; each draw is a distinct chance outcome.
    """

    __slots__ = ("batch",)

    def __init__(self, batch: np.ndarray):
        self.batch = np.atleast_2d(np.asarray(batch, dtype=np.float64))

    def __repr__(self) -> str:
        return f"ScenarioDraw({self.batch.tolist()})"


_ROOT_ACTION = (ActionId(0, "scenario"),)


class HarsanyiGame(Game):
    def __init__(self, inner: Game, models: Sequence[PayoffModel], scenarios_per_iteration: int = 1):
        if len(models) != inner.num_symbols:
            raise HarsanyiError(
                f"game declares {inner.num_symbols} payoff symbols but {len(models)} models were given"
            )
        if scenarios_per_iteration < 1:
            raise HarsanyiError("scenarios_per_iteration must be >= 1")
        self.inner = inner
        self.models = tuple(models)
        self.scenarios_per_iteration = scenarios_per_iteration
        self.num_symbols = inner.num_symbols
        self.player_names = inner.player_names
        self.means = scenario_means(self.models) if self.models else np.zeros(0)
        self._expected = ScenarioDraw(self.means[None, :])

    def default_scenario(self) -> np.ndarray:
        return self.means.copy()

    def expected_game(self) -> tuple[Game, np.ndarray]:
        """The wrapped game and the scenario of exact model means."""
        return self.inner, self.means.copy()

    def is_terminal(self, h: History) -> bool:
        return len(h) > 0 and self.inner.is_terminal(h[1:])

    def player_at(self, h: History) -> PlayerRole:
        return PlayerRole.CHANCE if not h else self.inner.player_at(h[1:])

    def legal_actions(self, h: History):
        return _ROOT_ACTION if not h else self.inner.legal_actions(h[1:])

    def successor(self, h: History, a: Any) -> History:
        if not h:
            return (a,) + tuple(self.inner.initial_history())
        return (h[0],) + tuple(self.inner.successor(h[1:], a))

    def info_key(self, h: History) -> InfoKey:
        if not h:
            raise HarsanyiError("the payoff root is not a strategic information set")
        return self.inner.info_key(h[1:])

    def chance_outcomes(self, h: History) -> list[tuple[Any, float]]:
        if not h:
            return [(self._expected, 1.0)]
        return self.inner.chance_outcomes(h[1:])

    def is_sampled_chance(self, h: History) -> bool:
        return not h or self.inner.is_sampled_chance(h[1:])

    def sample_chance(self, h: History, rng: np.random.Generator) -> Any:
        if h:
            return self.inner.sample_chance(h[1:], rng)
        if not self.models:
            return self._expected
        return ScenarioDraw(np.stack([sample_scenario(self.models, rng) for _ in range(self.scenarios_per_iteration)]))

    def utility(self, player: PlayerRole, z: History, scenario: np.ndarray | None = None) -> float:
        batch = z[0].batch
        inner_z = z[1:]
        if len(batch) == 1:
            return self.inner.utility(player, inner_z, batch[0])
        return math.fsum(self.inner.utility(player, inner_z, s) for s in batch) / len(batch)


def transform(game: Game, models: Sequence[PayoffModel], scenarios_per_iteration: int = 1) -> HarsanyiGame:
    return HarsanyiGame(game, models, scenarios_per_iteration)


def hcfr_solve(
    game: Game,
    models: Sequence[PayoffModel],
    iterations: int,
    config: CFRConfig | None = None,
    *,
    scenarios_per_iteration: int = 1,
) -> SolveResult:
    """Transform ``game`` and run CFR on it, tracing values on the expected game."""
    config = config or CFRConfig()
    transformed = transform(game, models, scenarios_per_iteration)
    inner, means = transformed.expected_game()
    solver = CFRSolver(
        transformed,
        config,
        eval_game=inner,
        eval_scenario=means,
        rng=np.random.default_rng(config.seed),
    )
    return solver.run(iterations)
