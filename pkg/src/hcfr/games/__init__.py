"""Built-in games and the preset registry used by the CLI."""

from __future__ import annotations

from pathlib import Path

from ..game import Game
from .kuhn import KuhnPoker, build_kuhn_poker
from .pennies import MatchingPennies, build_matching_pennies
from .routing import (
    NetworkError,
    RoutingGame,
    RoutingNetwork,
    build_routing_game,
    enumerate_routes,
    example_network,
    load_network,
    parse_network,
)

PRESETS = {
    "routing": build_routing_game,
    "kuhn": build_kuhn_poker,
    "pennies": build_matching_pennies,
}


def load_game(spec: str) -> Game:
    """Resolve a preset name or a path to a network file."""
    if spec in PRESETS:
        return PRESETS[spec]()
    path = Path(spec)
    if path.is_file():
        return build_routing_game(load_network(path))
    raise NetworkError(f"unknown game {spec!r}: not a preset ({', '.join(PRESETS)}) or a network file")


__all__ = [
    "KuhnPoker",
    "MatchingPennies",
    "NetworkError",
    "PRESETS",
    "RoutingGame",
    "RoutingNetwork",
    "build_kuhn_poker",
    "build_matching_pennies",
    "build_routing_game",
    "enumerate_routes",
    "example_network",
    "load_game",
    "load_network",
    "parse_network",
]
