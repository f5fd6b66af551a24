"""Regret-matching accumulators shared by the CFR engine."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .game import InfoKey, StrategyProfile

FALLBACKS = ("uniform", "max")


class DimensionError(ValueError):
    pass


def regret_matching_strategy(regrets: Sequence[float], fallback: str = "uniform") -> np.ndarray:
    """Probabilities proportional to positive cumulative regret.

    With no positive regret, ``fallback="uniform"`` returns the uniform
    distribution and ``fallback="max"`` puts all mass on the highest-regret
    action (lowest index on ties).
    """
    r = np.asarray(regrets, dtype=np.float64)
    if r.ndim != 1 or r.size == 0:
        raise DimensionError("regret row must be a non-empty vector")
    positive = np.maximum(r, 0.0)
    total = positive.sum()
    if total > 0.0:
        return positive / total
    if fallback == "uniform":
        return np.full(r.size, 1.0 / r.size)
    if fallback == "max":
        out = np.zeros(r.size)
        out[int(np.argmax(r))] = 1.0
        return out
    raise ValueError(f"unknown fallback {fallback!r}; expected one of {FALLBACKS}")


@dataclass
class NodeRecord:
    cumulative_regret: np.ndarray
    strategy_sum: np.ndarray
    current_strategy: np.ndarray
    labels: tuple[str, ...] = ()


@dataclass
class RegretTable:
    fallback: str = "uniform"
    nodes: dict[InfoKey, NodeRecord] = field(default_factory=dict)

    def register(self, key: InfoKey, num_actions: int, labels: Sequence[str] = ()) -> NodeRecord:
        node = self.nodes.get(key)
        if node is None:
            node = NodeRecord(
                np.zeros(num_actions),
                np.zeros(num_actions),
                np.full(num_actions, 1.0 / num_actions),
                tuple(labels),
            )
            self.nodes[key] = node
        elif node.cumulative_regret.size != num_actions:
            raise DimensionError(f"{key} registered with {node.cumulative_regret.size} actions, not {num_actions}")
        return node

    def __contains__(self, key: object) -> bool:
        return key in self.nodes

    def __getitem__(self, key: InfoKey) -> NodeRecord:
        return self.nodes[key]

    def __iter__(self) -> Iterator[InfoKey]:
        return iter(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def refresh_strategy(self, key: InfoKey) -> np.ndarray:
        node = self.nodes[key]
        node.current_strategy = regret_matching_strategy(node.cumulative_regret, self.fallback)
        return node.current_strategy

    def update_regret(self, key: InfoKey, instantaneous: Sequence[float]) -> None:
        node = self.nodes[key]
        inc = _row(instantaneous, node.cumulative_regret.size, key)
        node.cumulative_regret += inc

    def update_strategy_sum(self, key: InfoKey, reach_own: float, strategy: Sequence[float]) -> None:
        node = self.nodes[key]
        row = _row(strategy, node.strategy_sum.size, key)
        if reach_own < 0:
            raise ValueError(f"negative reach {reach_own} for {key}")
        node.strategy_sum += reach_own * row

    def average_strategy(self, key: InfoKey) -> np.ndarray:
        s = self.nodes[key].strategy_sum
        total = s.sum()
        if total > 0.0:
            return s / total
        return np.full(s.size, 1.0 / s.size)

    def average_profile(self) -> StrategyProfile:
        profile = StrategyProfile()
        for key, node in self.nodes.items():
            profile.probs[key] = self.average_strategy(key)
            profile.labels[key] = node.labels
        return profile

    def current_profile(self) -> StrategyProfile:
        profile = StrategyProfile()
        for key, node in self.nodes.items():
            profile.probs[key] = node.current_strategy.copy()
            profile.labels[key] = node.labels
        return profile


def _row(values: Sequence[float], size: int, key: InfoKey) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape != (size,):
        raise DimensionError(f"{key}: expected {size} entries, got shape {arr.shape}")
    return arr
