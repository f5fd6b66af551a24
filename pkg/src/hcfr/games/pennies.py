"""Matching pennies with a (possibly uncertain) stake."""

from __future__ import annotations

import numpy as np

from ..distributions import Constant, PayoffModel
from ..game import ActionId, Game, History, InfoKey, PlayerRole

_ACTIONS = (ActionId(0, "H"), ActionId(1, "T"))


class MatchingPennies(Game):
    """Player 1 picks heads/tails unseen, then player 2 picks.

    A match pays player 1 the stake ``U_1``; a mismatch pays it to player 2.
    """

    num_symbols = 1

    def __init__(self, stake: PayoffModel | None = None):
        self.stake = stake if stake is not None else Constant(1.0)

    @property
    def payoff_models(self) -> list[PayoffModel]:
        return [self.stake]

    def default_scenario(self) -> np.ndarray:
        return np.array([self.stake.mean()])

    def is_terminal(self, h: History) -> bool:
        return len(h) == 2

    def player_at(self, h: History) -> PlayerRole:
        return PlayerRole(len(h))

    def legal_actions(self, h: History):
        return () if len(h) == 2 else _ACTIONS

    def info_key(self, h: History) -> InfoKey:
        # player 2 does not observe player 1's coin
        return InfoKey(PlayerRole(len(h)), b"")

    def utility(self, player: PlayerRole, z: History, scenario: np.ndarray) -> float:
        u1 = float(scenario[0]) if z[0] == z[1] else -float(scenario[0])
        return u1 if player is PlayerRole.PLAYER1 else -u1


def build_matching_pennies(stake: PayoffModel | None = None) -> MatchingPennies:
    return MatchingPennies(stake)
