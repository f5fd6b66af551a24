"""Attacker/defender routing game on a directed acyclic network.

The attacker secretly places up to ``budget`` IEDs on attackable nodes (or
none); the defender then walks from the source to the sink one edge at a time
without observing the placement. The attacker collects ``U_k`` for every
attacked node ``k`` the defender's route visits; the game is zero-sum.

History layout: ``(attack, e1, e2, ...)`` with ``attack`` indexing
:attr:`RoutingGame.attacks` and each ``e`` indexing the sorted out-edges of
the defender's current node.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from itertools import combinations
from pathlib import Path

import numpy as np

from ..game import ActionId, Game, History, InfoKey, PlayerRole


class NetworkError(ValueError):
    """Invalid network definition or network file."""


@dataclass(frozen=True)
class RoutingNetwork:
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    source: str
    sink: str
    attackable: tuple[str, ...]
    budget: int = 1

    def __post_init__(self):
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise NetworkError("duplicate node names")
        for name in (self.source, self.sink, *self.attackable):
            if name not in known:
                raise NetworkError(f"unknown node {name!r}")
        for a, b in self.edges:
            if a not in known or b not in known:
                raise NetworkError(f"edge {a}->{b} references an unknown node")
            if a == b:
                raise NetworkError(f"self-loop on {a!r}")
        if len(set(self.edges)) != len(self.edges):
            raise NetworkError("duplicate edges")
        if self.source == self.sink:
            raise NetworkError("source and sink must differ")
        if self.source in self.attackable or self.sink in self.attackable:
            raise NetworkError("source and sink cannot be attackable")
        if len(set(self.attackable)) != len(self.attackable):
            raise NetworkError("duplicate attackable nodes")
        if self.budget < 0:
            raise NetworkError("budget must be non-negative")
        self._check_acyclic()
        reachable = self._reachable_from(self.source)
        if self.sink not in reachable:
            raise NetworkError(f"no path from {self.source} to {self.sink}")
        for node in reachable - {self.sink}:
            if self.sink not in self._reachable_from(node):
                raise NetworkError(f"node {node!r} is reachable but cannot reach the sink")

    def successors(self, node: str) -> tuple[str, ...]:
        return tuple(sorted(b for a, b in self.edges if a == node))

    def _reachable_from(self, start: str) -> set[str]:
        seen, stack = {start}, [start]
        while stack:
            for nxt in self.successors(stack.pop()):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return seen

    def _check_acyclic(self) -> None:
        state: dict[str, int] = {}

        def visit(node: str) -> None:
            state[node] = 1
            for nxt in self.successors(node):
                mark = state.get(nxt, 0)
                if mark == 1:
                    raise NetworkError(f"cycle through {nxt!r}")
                if mark == 0:
                    visit(nxt)
            state[node] = 2

        for node in self.nodes:
            if state.get(node, 0) == 0:
                visit(node)


def enumerate_routes(network: RoutingNetwork) -> list[tuple[str, ...]]:
    """All simple source-to-sink paths, lexicographically ordered by node names."""
    routes: list[tuple[str, ...]] = []

    def extend(path: tuple[str, ...]) -> None:
        node = path[-1]
        if node == network.sink:
            routes.append(path)
            return
        for nxt in network.successors(node):
            if nxt in path:
                raise NetworkError(f"cycle through {nxt!r}")
            extend(path + (nxt,))

    extend((network.source,))
    return sorted(routes)


_DIRECTIVES = {"node", "edge", "source", "sink", "attackable", "budget"}


def parse_network(text: str) -> RoutingNetwork:
    """Parse the line-oriented network format (``#`` starts a comment)."""
    nodes: list[str] = []
    edges: list[tuple[str, str]] = []
    attackable: list[str] = []
    source = sink = None
    budget = 1
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        directive, *args = line.split()
        if directive not in _DIRECTIVES:
            raise NetworkError(f"line {lineno}: unknown directive {directive!r}")
        want = 2 if directive == "edge" else 1
        if len(args) != want:
            raise NetworkError(f"line {lineno}: {directive} takes {want} argument(s)")
        if directive == "node":
            nodes.append(args[0])
        elif directive == "edge":
            edges.append((args[0], args[1]))
        elif directive == "source":
            source = args[0]
        elif directive == "sink":
            sink = args[0]
        elif directive == "attackable":
            attackable.append(args[0])
        else:
            try:
                budget = int(args[0])
            except ValueError:
                raise NetworkError(f"line {lineno}: budget must be an integer") from None
    if source is None or sink is None:
        raise NetworkError("network needs both a source and a sink")
    return RoutingNetwork(tuple(nodes), tuple(edges), source, sink, tuple(attackable), budget)


def load_network(path: str | Path) -> RoutingNetwork:
    return parse_network(Path(path).read_text())


def example_network() -> RoutingNetwork:
    """Bundled example network: four S-to-T routes, every one through v3 and v6."""
    text = resources.files("hcfr.games").joinpath("data/example.net").read_text()
    return parse_network(text)


class RoutingGame(Game):
    player_names = ("attacker", "defender")

    def __init__(self, network: RoutingNetwork):
        self.network = network
        self.num_symbols = len(network.attackable)
        attacks: list[tuple[int, ...]] = [()]
        for size in range(1, min(network.budget, len(network.attackable)) + 1):
            attacks.extend(combinations(range(len(network.attackable)), size))
        self.attacks: tuple[tuple[int, ...], ...] = tuple(attacks)
        self._attack_actions = tuple(
            ActionId(i, "+".join(network.attackable[k] for k in combo) or "none")
            for i, combo in enumerate(self.attacks)
        )
        self._moves = {node: network.successors(node) for node in network.nodes}
        self._move_actions = {
            node: tuple(ActionId(i, nxt) for i, nxt in enumerate(succ))
            for node, succ in self._moves.items()
        }

    def path(self, h: History) -> tuple[str, ...]:
        """Nodes visited by the defender so far (starting at the source)."""
        node = self.network.source
        path = [node]
        for e in h[1:]:
            node = self._moves[node][e]
            path.append(node)
        return tuple(path)

    def is_terminal(self, h: History) -> bool:
        return len(h) > 0 and self.path(h)[-1] == self.network.sink

    def player_at(self, h: History) -> PlayerRole:
        return PlayerRole.PLAYER1 if not h else PlayerRole.PLAYER2

    def legal_actions(self, h: History):
        if not h:
            return self._attack_actions
        node = self.path(h)[-1]
        if node == self.network.sink:
            return ()
        return self._move_actions[node]

    def info_key(self, h: History) -> InfoKey:
        if not h:
            return InfoKey.of(PlayerRole.PLAYER1, "attack")
        # the attacker's placement h[0] is deliberately left out
        return InfoKey.of(PlayerRole.PLAYER2, ">".join(self.path(h)))

    def utility(self, player: PlayerRole, z: History, scenario: np.ndarray) -> float:
        visited = set(self.path(z))
        attacked = self.attacks[z[0]]
        u = 0.0
        for k in attacked:
            if self.network.attackable[k] in visited:
                u += float(scenario[k])
        return u if player is PlayerRole.PLAYER1 else -u

    def attack_payoff_matrix(self, scenario: np.ndarray) -> np.ndarray:
        """Attacker payoff for every (attack action, route) pair, routes in lexicographic order."""
        routes = enumerate_routes(self.network)
        out = np.zeros((len(self.attacks), len(routes)))
        for i, combo in enumerate(self.attacks):
            for j, route in enumerate(routes):
                out[i, j] = sum(float(scenario[k]) for k in combo if self.network.attackable[k] in route)
        return out


def build_routing_game(network: RoutingNetwork | None = None) -> RoutingGame:
    return RoutingGame(network if network is not None else example_network())
