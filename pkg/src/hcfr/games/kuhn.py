"""Three-card Kuhn poker.

History layout: ``(deal, a1, a2, ...)`` where ``deal`` indexes
:data:`DEALS` and betting actions are 0 = pass, 1 = bet. Both players ante 1.
"""

from __future__ import annotations

from itertools import permutations

import numpy as np

from ..game import ActionId, Game, History, InfoKey, PlayerRole

CARDS = "JQK"
DEALS: tuple[tuple[int, int], ...] = tuple(permutations(range(3), 2))
_BETTING = (ActionId(0, "p"), ActionId(1, "b"))
_DEAL_ACTIONS = tuple(ActionId(i, CARDS[a] + CARDS[b]) for i, (a, b) in enumerate(DEALS))
_TERMINAL_LINES = {(0, 0), (0, 1, 0), (0, 1, 1), (1, 0), (1, 1)}


class KuhnPoker(Game):
    num_symbols = 0

    def is_terminal(self, h: History) -> bool:
        return tuple(h[1:]) in _TERMINAL_LINES

    def player_at(self, h: History) -> PlayerRole:
        if not h:
            return PlayerRole.CHANCE
        return PlayerRole((len(h) - 1) % 2)

    def legal_actions(self, h: History):
        if not h:
            return _DEAL_ACTIONS
        if self.is_terminal(h):
            return ()
        return _BETTING

    def chance_probabilities(self, h: History) -> np.ndarray:
        if h:
            return super().chance_probabilities(h)
        return np.full(len(DEALS), 1.0 / len(DEALS))

    def info_key(self, h: History) -> InfoKey:
        player = self.player_at(h)
        card = CARDS[DEALS[h[0]][player]]
        line = "".join(_BETTING[a].label for a in h[1:])
        return InfoKey.of(player, card + line)

    def utility(self, player: PlayerRole, z: History, scenario: np.ndarray) -> float:
        c1, c2 = DEALS[z[0]]
        line = tuple(z[1:])
        if line == (1, 0):
            u1 = 1.0
        elif line == (0, 1, 0):
            u1 = -1.0
        else:
            stake = 2.0 if 1 in line else 1.0
            u1 = stake if c1 > c2 else -stake
        return u1 if player is PlayerRole.PLAYER1 else -u1


def build_kuhn_poker() -> KuhnPoker:
    return KuhnPoker()
