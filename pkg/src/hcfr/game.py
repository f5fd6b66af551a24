"""Extensive-form game contract and the traversal utilities built on it.

A game is never materialized as a tree. Every routine here walks it through
``successor`` starting from ``initial_history``, so the only state kept is
whatever the caller accumulates (reach products, visited keys, ...).

Histories are plain tuples of actions. For ordinary decision and chance nodes
an action is its dense integer index into ``legal_actions(h)``; a *sampled*
chance node (see :meth:`Game.is_sampled_chance`) may use any hashable outcome.
"""

from __future__ import annotations

import enum
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

History = tuple
PROB_ATOL = 1e-9


class GameError(Exception):
    """Base class for game-contract violations."""


class MissingStrategyError(GameError, KeyError):
    """A profile has no entry for an information set on the traversed path."""


class UnknownInfosetError(GameError, KeyError):
    pass


class MalformedGameError(GameError):
    """The successor function does not describe a finite tree."""


class InvalidInfosetError(GameError, ValueError):
    pass


class PlayerRole(enum.IntEnum):
    PLAYER1 = 0
    PLAYER2 = 1
    CHANCE = 2

    @property
    def opponent(self) -> "PlayerRole":
        if self is PlayerRole.CHANCE:
            raise ValueError("chance has no opponent")
        return PlayerRole(1 - self.value)


STRATEGIC_PLAYERS = (PlayerRole.PLAYER1, PlayerRole.PLAYER2)


class ActionId(NamedTuple):
    index: int
    label: str


@dataclass(frozen=True, order=True)
class InfoKey:
    """Hashable information-set identifier.

    ``observation`` is the owner's view of the history serialized to bytes:
    its private observations followed by the public action sequence.
    """

    owner: PlayerRole
    observation: bytes

    def __str__(self) -> str:
        return self.observation.decode("utf-8")

    @classmethod
    def of(cls, owner: PlayerRole, text: str) -> "InfoKey":
        return cls(PlayerRole(owner), text.encode("utf-8"))


class Game(ABC):
    """Two-player zero-sum extensive-form game with scenario-dependent payoffs.

    ``num_symbols`` counts the uncertain payoff symbols ``U_k``; ``utility``
    receives a scenario (array of length ``num_symbols``) fixing all of them.
    Implementations must be immutable after construction.
    """

    num_symbols: int = 0
    player_names: tuple[str, str] = ("player1", "player2")

    def initial_history(self) -> History:
        return ()

    @abstractmethod
    def is_terminal(self, h: History) -> bool: ...

    @abstractmethod
    def player_at(self, h: History) -> PlayerRole: ...

    @abstractmethod
    def legal_actions(self, h: History) -> Sequence[ActionId]: ...

    def successor(self, h: History, a: Any) -> History:
        return h + (a,)

    @abstractmethod
    def info_key(self, h: History) -> InfoKey: ...

    @abstractmethod
    def utility(self, player: PlayerRole, z: History, scenario: np.ndarray) -> float: ...

    def chance_probabilities(self, h: History) -> np.ndarray:
        """Outcome distribution at a chance node, aligned with ``legal_actions``."""
        raise GameError(f"history {h!r} is not a chance node")

    def chance_outcomes(self, h: History) -> list[tuple[Any, float]]:
        """(action, probability) pairs used by exact traversals.

        At a sampled chance node this is the finite stand-in that exact
        evaluators expand (for the Harsanyi root: the expected scenario).
        """
        probs = self.chance_probabilities(h)
        return [(a.index, float(p)) for a, p in zip(self.legal_actions(h), probs)]

    def is_sampled_chance(self, h: History) -> bool:
        """True for chance nodes that solvers must sample instead of expand."""
        return False

    def sample_chance(self, h: History, rng: np.random.Generator) -> Any:
        outcomes = self.chance_outcomes(h)
        idx = rng.choice(len(outcomes), p=[p for _, p in outcomes])
        return outcomes[idx][0]

    def default_scenario(self) -> np.ndarray:
        return np.zeros(self.num_symbols)


@dataclass
class StrategyProfile:
    """Behavioral strategies for both players, keyed by information set."""

    probs: dict[InfoKey, np.ndarray] = field(default_factory=dict)
    labels: dict[InfoKey, tuple[str, ...]] = field(default_factory=dict)

    def __getitem__(self, key: InfoKey) -> np.ndarray:
        try:
            return self.probs[key]
        except KeyError:
            raise MissingStrategyError(key) from None

    def __contains__(self, key: object) -> bool:
        return key in self.probs

    def __iter__(self) -> Iterator[InfoKey]:
        return iter(self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def set(self, key: InfoKey, probs: Sequence[float], labels: Sequence[str] | None = None) -> None:
        arr = np.asarray(probs, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError(f"strategy for {key} must be a non-empty vector")
        if np.any(arr < -PROB_ATOL) or abs(arr.sum() - 1.0) > PROB_ATOL:
            raise ValueError(f"strategy for {key} is not a distribution: {arr}")
        self.probs[key] = arr
        if labels is not None:
            self.labels[key] = tuple(labels)

    def for_player(self, player: PlayerRole) -> dict[InfoKey, np.ndarray]:
        return {k: v for k, v in self.probs.items() if k.owner == player}

    def merged(self, other: "StrategyProfile") -> "StrategyProfile":
        out = StrategyProfile(dict(self.probs), dict(self.labels))
        out.probs.update(other.probs)
        out.labels.update(other.labels)
        return out

    def normalized(self) -> "StrategyProfile":
        out = StrategyProfile(labels=dict(self.labels))
        for key, row in self.probs.items():
            row = np.clip(np.asarray(row, dtype=np.float64), 0.0, None)
            total = row.sum()
            out.probs[key] = row / total if total > 0 else np.full(row.size, 1.0 / row.size)
        return out

    @classmethod
    def uniform(cls, game: Game) -> "StrategyProfile":
        profile = cls()
        for player in STRATEGIC_PLAYERS:
            for key, labels in enumerate_infosets(game)[player].items():
                profile.set(key, np.full(len(labels), 1.0 / len(labels)), labels)
        return profile


def action_probabilities(
    game: Game, h: History, profile: Mapping[InfoKey, np.ndarray] | StrategyProfile
) -> list[tuple[Any, float]]:
    """(action, probability) pairs at a non-terminal history under ``profile``."""
    player = game.player_at(h)
    if player is PlayerRole.CHANCE:
        return game.chance_outcomes(h)
    key = game.info_key(h)
    try:
        row = profile[key]
    except KeyError:
        raise MissingStrategyError(key) from None
    return list(enumerate(np.asarray(row, dtype=np.float64).tolist()))


def reach_probability(
    game: Game,
    h: History,
    profile: StrategyProfile,
    exclude: PlayerRole | None = None,
) -> float:
    """Product of every contributor's probability along the path to ``h``.

    Factors owned by ``exclude`` are skipped, so ``exclude=i`` yields the
    opponent-and-chance reach. A sampled chance node contributes a factor of 1.
    """
    reach = 1.0
    prefix = game.initial_history()
    for a in h[len(prefix):]:
        if game.is_terminal(prefix):
            raise MalformedGameError(f"history {h!r} continues past a terminal")
        player = game.player_at(prefix)
        if player is not exclude:
            if player is PlayerRole.CHANCE:
                if not game.is_sampled_chance(prefix):
                    reach *= dict(game.chance_outcomes(prefix))[a]
            else:
                reach *= float(profile[game.info_key(prefix)][a])
        prefix = game.successor(prefix, a)
    return reach


def _walk(game: Game, max_depth: int | None = None) -> Iterator[History]:
    """Pre-order walk over every reachable history (exact chance expansion)."""
    stack = [(game.initial_history(), 0)]
    while stack:
        h, depth = stack.pop()
        if max_depth is not None and depth > max_depth:
            raise MalformedGameError(f"game deeper than {max_depth}")
        yield h
        if game.is_terminal(h):
            continue
        if game.player_at(h) is PlayerRole.CHANCE:
            children = [game.successor(h, a) for a, _ in game.chance_outcomes(h)]
        else:
            children = [game.successor(h, a.index) for a in game.legal_actions(h)]
        for child in reversed(children):
            if len(child) <= len(h) or child[: len(h)] != h:
                raise MalformedGameError(f"successor of {h!r} does not extend it: {child!r}")
            stack.append((child, depth + 1))


def walk_histories(game: Game, max_depth: int | None = None) -> Iterator[History]:
    return _walk(game, max_depth)


def enumerate_infosets(game: Game) -> dict[PlayerRole, dict[InfoKey, tuple[str, ...]]]:
    """Every strategic information set, with its action labels, per player."""
    result: dict[PlayerRole, dict[InfoKey, tuple[str, ...]]] = {p: {} for p in STRATEGIC_PLAYERS}
    visited: set = set()
    for h in _walk(game):
        if h in visited:
            raise MalformedGameError(f"history {h!r} reached twice")
        visited.add(h)
        if game.is_terminal(h):
            continue
        player = game.player_at(h)
        if player is PlayerRole.CHANCE:
            continue
        key = game.info_key(h)
        if key.owner is not player:
            raise MalformedGameError(f"info key {key} at {h!r} not owned by {player.name}")
        labels = tuple(a.label for a in game.legal_actions(h))
        known = result[player].get(key)
        if known is not None and known != labels:
            raise MalformedGameError(f"infoset {key} has inconsistent actions {known} vs {labels}")
        result[player][key] = labels
    return result


def game_depth(game: Game, limit: int) -> int:
    depth = 0
    for h in _walk(game, max_depth=limit):
        depth = max(depth, len(h))
    return depth


def infoset_members(game: Game, key: InfoKey) -> list[History]:
    members = [
        h
        for h in _walk(game)
        if not game.is_terminal(h)
        and game.player_at(h) is not PlayerRole.CHANCE
        and game.info_key(h) == key
    ]
    if not members:
        raise UnknownInfosetError(key)
    return members


def infoset_reach(game: Game, key: InfoKey, profile: StrategyProfile) -> float:
    return sum(reach_probability(game, h, profile) for h in infoset_members(game, key))


def terminal_distribution(
    game: Game, profile: StrategyProfile
) -> Iterator[tuple[History, float]]:
    """Yield every terminal history with its full reach probability."""
    stack = [(game.initial_history(), 1.0)]
    while stack:
        h, reach = stack.pop()
        if game.is_terminal(h):
            yield h, reach
            continue
        for a, p in action_probabilities(game, h, profile):
            stack.append((game.successor(h, a), reach * p))


def expected_value(
    game: Game,
    profile: StrategyProfile,
    scenario: np.ndarray | None = None,
) -> float:
    """Player 1's expected payoff under ``profile``.

    ``scenario`` is either one scenario (shape ``(K,)``), whose payoffs are
    used as exact terminal utilities, or a batch of Monte Carlo scenarios
    (shape ``(N, K)``) averaged per terminal.
    """
    scenarios = _as_batch(game, scenario)
    total = 0.0
    for z, reach in terminal_distribution(game, profile):
        if reach == 0.0:
            continue
        u = sum(game.utility(PlayerRole.PLAYER1, z, s) for s in scenarios) / len(scenarios)
        total += reach * u
    return total


def _as_batch(game: Game, scenario: np.ndarray | None) -> np.ndarray:
    if scenario is None:
        scenario = game.default_scenario()
    arr = np.asarray(scenario, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != game.num_symbols or arr.shape[0] == 0:
        raise ValueError(
            f"scenario shape {arr.shape} incompatible with {game.num_symbols} payoff symbols"
        )
    return arr
