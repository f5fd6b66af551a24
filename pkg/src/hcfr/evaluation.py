"""Exact best responses, exploitability and convergence traces.

All evaluation is exact: chance nodes are expanded through
``chance_outcomes`` and terminal utilities come from a fixed scenario
(normally the vector of model means, i.e. the expected-payoff game).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .game import (
    Game,
    History,
    InfoKey,
    PlayerRole,
    StrategyProfile,
    _as_batch,
    action_probabilities,
    expected_value,
)

TIE_ATOL = 1e-12


@dataclass
class BestResponse:
    value: float
    actions: dict[InfoKey, int]


def best_response(
    game: Game,
    profile: StrategyProfile,
    responder: PlayerRole,
    scenario: np.ndarray | None = None,
) -> BestResponse:
    """Pure best response of ``responder`` against the opponent's part of ``profile``.

    Each responder infoset picks the action maximizing the sum, over its member
    histories, of opponent-and-chance reach times the continuation value.
    Perfect recall makes this bottom-up recursion well-founded.
    """
    if responder is PlayerRole.CHANCE:
        raise ValueError("chance cannot best-respond")
    scenarios = _as_batch(game, scenario)
    sign = 1.0 if responder is PlayerRole.PLAYER1 else -1.0

    members: dict[InfoKey, list[tuple[History, float]]] = defaultdict(list)
    stack = [(game.initial_history(), 1.0)]
    while stack:
        h, reach = stack.pop()
        if game.is_terminal(h):
            continue
        if game.player_at(h) is responder:
            members[game.info_key(h)].append((h, reach))
            for a in game.legal_actions(h):
                stack.append((game.successor(h, a.index), reach))
        else:
            for a, p in action_probabilities(game, h, profile):
                stack.append((game.successor(h, a), reach * p))

    values: dict[History, float] = {}
    choice: dict[InfoKey, int] = {}

    def best_action(key: InfoKey) -> int:
        if key not in choice:
            group = members[key]
            n = len(game.legal_actions(group[0][0]))
            totals = [
                math.fsum(r * value(game.successor(h, a)) for h, r in group) for a in range(n)
            ]
            top = max(totals)
            choice[key] = next(a for a, t in enumerate(totals) if t >= top - TIE_ATOL)
        return choice[key]

    def value(h: History) -> float:
        cached = values.get(h)
        if cached is not None:
            return cached
        if game.is_terminal(h):
            v = sign * math.fsum(game.utility(PlayerRole.PLAYER1, h, s) for s in scenarios) / len(scenarios)
        elif game.player_at(h) is responder:
            v = value(game.successor(h, best_action(game.info_key(h))))
        else:
            v = math.fsum(p * value(game.successor(h, a)) for a, p in action_probabilities(game, h, profile) if p)
        values[h] = v
        return v

    root = value(game.initial_history())
    for key in members:
        best_action(key)
    return BestResponse(root, choice)


def best_response_value(
    game: Game,
    profile: StrategyProfile,
    responder: PlayerRole,
    scenario: np.ndarray | None = None,
) -> float:
    return best_response(game, profile, responder, scenario).value


def exploitability(game: Game, profile: StrategyProfile, scenario: np.ndarray | None = None) -> float:
    """Sum of both players' best-response values; zero exactly at a Nash equilibrium."""
    return (
        best_response_value(game, profile, PlayerRole.PLAYER1, scenario)
        + best_response_value(game, profile, PlayerRole.PLAYER2, scenario)
    )


@dataclass(frozen=True)
class TracePoint:
    iteration: int
    expected_value: float
    exploitability: Optional[float] = None
    wall_time: float = 0.0


@dataclass
class ConvergenceTrace:
    rows: list[TracePoint] = field(default_factory=list)

    def append(self, row: TracePoint) -> None:
        if self.rows and row.iteration <= self.rows[-1].iteration:
            raise ValueError(
                f"trace iterations must increase: {row.iteration} after {self.rows[-1].iteration}"
            )
        if not math.isfinite(row.expected_value):
            raise ValueError(f"non-finite expected value at iteration {row.iteration}")
        self.rows.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    @property
    def iterations(self) -> np.ndarray:
        return np.array([r.iteration for r in self.rows])

    @property
    def values(self) -> np.ndarray:
        return np.array([r.expected_value for r in self.rows])


def trace_point(
    trace: ConvergenceTrace,
    game: Game,
    profile: StrategyProfile,
    t: int,
    scenario: np.ndarray | None = None,
    with_exploitability: bool = False,
    wall_time: float = 0.0,
) -> TracePoint:
    ev = expected_value(game, profile, scenario)
    eps = exploitability(game, profile, scenario) if with_exploitability else None
    row = TracePoint(t, ev, eps, wall_time)
    trace.append(row)
    return row
