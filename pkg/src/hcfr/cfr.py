"""Vanilla counterfactual regret minimization.

One iteration is a single recursive walk of the tree that carries the reach
contribution of each player (and chance) downwards and returns player 1's
expected utility upwards. Counterfactual regrets and own-reach weights are
buffered per information set during the walk and folded into the
:class:`~hcfr.regret.RegretTable` afterwards, so every infoset is updated
exactly once per iteration with the strategy it was evaluated under.

Chance nodes are expanded exhaustively, except nodes the game marks as
sampled (the Harsanyi payoff root): those draw one outcome per iteration,
shared by every traversal of that iteration, with a reach factor of 1.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .evaluation import ConvergenceTrace, trace_point
from .game import (
    Game,
    History,
    InfoKey,
    InvalidInfosetError,
    PlayerRole,
    StrategyProfile,
    _as_batch,
    action_probabilities,
    enumerate_infosets,
    game_depth,
    infoset_members,
    reach_probability,
)
from .regret import FALLBACKS, RegretTable

P1, P2, CHANCE = PlayerRole.PLAYER1, PlayerRole.PLAYER2, PlayerRole.CHANCE


@dataclass
class CFRConfig:
    alternating: bool = False
    fallback: str = "uniform"
    # 0 disables exploitability in the trace; K>0 records it every K iterations and at T
    exploit_every: int = 0
    track_values: bool = True
    max_depth: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.fallback not in FALLBACKS:
            raise ValueError(f"fallback must be one of {FALLBACKS}, got {self.fallback!r}")
        if self.exploit_every < 0:
            raise ValueError("exploit_every must be >= 0")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


@dataclass
class SolveResult:
    profile: StrategyProfile
    trace: ConvergenceTrace
    table: RegretTable
    iteration_values: list[tuple[float, float]] = field(default_factory=list)


class CFRSolver:
    """Solver state: regret table, iteration counter and the game being solved.

    ``scenario`` fixes the terminal utilities used during traversal (games
    without uncertain payoffs ignore it). ``eval_game``/``eval_scenario``
    select what the convergence trace is computed on; by default the solved
    game itself.
    """

    def __init__(
        self,
        game: Game,
        config: CFRConfig | None = None,
        *,
        scenario: np.ndarray | None = None,
        eval_game: Game | None = None,
        eval_scenario: np.ndarray | None = None,
        rng: np.random.Generator | None = None,
    ):
        self.game = game
        self.config = config or CFRConfig()
        depth = game_depth(game, self.config.max_depth)
        if sys.getrecursionlimit() < 4 * depth + 200:
            sys.setrecursionlimit(4 * depth + 200)
        self.scenario = _as_batch(game, scenario)[0]
        self.eval_game = eval_game or game
        if eval_scenario is None and eval_game is None:
            eval_scenario = self.scenario
        self.eval_scenario = eval_scenario
        self.rng = rng if rng is not None else np.random.default_rng(self.config.seed)
        self.table = RegretTable(fallback=self.config.fallback)
        for infosets in enumerate_infosets(game).values():
            for key, labels in infosets.items():
                self.table.register(key, len(labels), labels)
        self.iteration = 0
        self.trace = ConvergenceTrace()
        self.iteration_values: list[tuple[float, float]] = []

    # -- traversal -----------------------------------------------------------

    def _traverse(
        self,
        h: History,
        r1: float,
        r2: float,
        rc: float,
        updating: tuple[PlayerRole, ...],
        sampled: dict[History, Any],
        regrets: dict[InfoKey, np.ndarray],
        own_reach: dict[InfoKey, float],
    ) -> float:
        game = self.game
        if game.is_terminal(h):
            return game.utility(P1, h, self.scenario)
        player = game.player_at(h)
        if player is CHANCE:
            if game.is_sampled_chance(h):
                a = sampled.get(h)
                if a is None:
                    a = sampled[h] = game.sample_chance(h, self.rng)
                return self._traverse(game.successor(h, a), r1, r2, rc, updating, sampled, regrets, own_reach)
            return math.fsum(
                p * self._traverse(game.successor(h, a), r1, r2, rc * p, updating, sampled, regrets, own_reach)
                for a, p in game.chance_outcomes(h)
            )

        key = game.info_key(h)
        sigma = self.table.nodes[key].current_strategy
        n = sigma.size
        child = np.empty(n)
        for a in range(n):
            if player is P1:
                child[a] = self._traverse(game.successor(h, a), r1 * sigma[a], r2, rc, updating, sampled, regrets, own_reach)
            else:
                child[a] = self._traverse(game.successor(h, a), r1, r2 * sigma[a], rc, updating, sampled, regrets, own_reach)
        node_value = float(np.dot(sigma, child))

        if player in updating:
            if player is P1:
                opp, own, sign = r2 * rc, r1, 1.0
            else:
                opp, own, sign = r1 * rc, r2, -1.0
            inc = opp * sign * (child - node_value)
            buf = regrets.get(key)
            if buf is None:
                regrets[key] = inc
                own_reach[key] = own
            else:
                buf += inc
        return node_value

    def _apply(self, regrets: dict[InfoKey, np.ndarray], own_reach: dict[InfoKey, float]) -> None:
        for key, inc in regrets.items():
            node = self.table.nodes[key]
            self.table.update_regret(key, inc)
            self.table.update_strategy_sum(key, own_reach[key], node.current_strategy)

    def _refresh(self, players: tuple[PlayerRole, ...] = (P1, P2)) -> None:
        for key in self.table:
            if key.owner in players:
                self.table.refresh_strategy(key)

    # -- public API ----------------------------------------------------------

    def iterate(self) -> tuple[float, float]:
        """Run one CFR iteration; returns (player 1, player 2) expected values under σᵗ."""
        sampled: dict[History, Any] = {}
        root = self.game.initial_history()
        if not self.config.alternating:
            self._refresh()
            regrets: dict[InfoKey, np.ndarray] = {}
            own: dict[InfoKey, float] = {}
            v = self._traverse(root, 1.0, 1.0, 1.0, (P1, P2), sampled, regrets, own)
            self._apply(regrets, own)
        else:
            v = 0.0
            for i, player in enumerate((P1, P2)):
                # player 2 responds to player 1's freshly updated regrets
                self._refresh((P1,) if i else (P1, P2))
                regrets, own = {}, {}
                val = self._traverse(root, 1.0, 1.0, 1.0, (player,), sampled, regrets, own)
                if i == 0:
                    v = val
                self._apply(regrets, own)
        self.iteration += 1
        values = (v, -v)
        self.iteration_values.append(values)
        return values

    def average_profile(self) -> StrategyProfile:
        return self.table.average_profile()

    def record_trace(self, last_iteration: int | None = None, started: float | None = None) -> None:
        every = self.config.exploit_every
        t = self.iteration
        with_eps = every > 0 and (t % every == 0 or t == last_iteration)
        trace_point(
            self.trace,
            self.eval_game,
            self.average_profile(),
            t,
            self.eval_scenario,
            with_exploitability=with_eps,
            wall_time=time.perf_counter() - started if started is not None else 0.0,
        )

    def run(self, iterations: int) -> SolveResult:
        if iterations < 1:
            raise ValueError("iteration count must be >= 1")
        started = time.perf_counter()
        last = self.iteration + iterations
        for _ in range(iterations):
            self.iterate()
            if self.config.track_values:
                self.record_trace(last, started)
        return SolveResult(self.average_profile(), self.trace, self.table, list(self.iteration_values))


def cfr_iteration(solver: CFRSolver) -> tuple[float, float]:
    return solver.iterate()


def solve(
    game: Game,
    iterations: int,
    config: CFRConfig | None = None,
    *,
    scenario: np.ndarray | None = None,
) -> SolveResult:
    """Run ``iterations`` CFR iterations from uniform and return the average strategy."""
    return CFRSolver(game, config, scenario=scenario).run(iterations)


def subtree_value(game: Game, h: History, profile: StrategyProfile, scenario: np.ndarray) -> float:
    """Player 1's exact expected utility below ``h`` when everyone follows ``profile``."""
    if game.is_terminal(h):
        return game.utility(P1, h, scenario)
    return math.fsum(
        p * subtree_value(game, game.successor(h, a), profile, scenario)
        for a, p in action_probabilities(game, h, profile)
        if p
    )


@dataclass
class CounterfactualValues:
    value: float
    per_action: np.ndarray


def counterfactual_values(
    game: Game,
    key: InfoKey,
    profile: StrategyProfile,
    scenario: np.ndarray | None = None,
) -> CounterfactualValues:
    """Counterfactual value of ``key`` for its owner, evaluated literally.

    Sums over the infoset's member histories, weighting the owner's utility by
    opponent-and-chance reach. Independent of the solver's traversal and used
    to check it.
    """
    if key.owner is CHANCE:
        raise InvalidInfosetError(f"{key} belongs to chance")
    s = _as_batch(game, scenario)[0]
    owner = key.owner
    sign = 1.0 if owner is P1 else -1.0
    members = infoset_members(game, key)
    n = len(game.legal_actions(members[0]))
    per_action = np.zeros(n)
    for h in members:
        opp = reach_probability(game, h, profile, exclude=owner)
        for a in range(n):
            per_action[a] += opp * sign * subtree_value(game, game.successor(h, a), profile, s)
    sigma = np.asarray(profile[key], dtype=np.float64)
    return CounterfactualValues(float(np.dot(sigma, per_action)), per_action)
