import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcfr.game import (
    ActionId,
    Game,
    InfoKey,
    MalformedGameError,
    MissingStrategyError,
    PlayerRole,
    StrategyProfile,
    UnknownInfosetError,
    enumerate_infosets,
    expected_value,
    infoset_reach,
    reach_probability,
    terminal_distribution,
    walk_histories,
)
from oracles import (
    expected_payoff,
    infoset_reach_bruteforce,
    kuhn_equilibrium,
    random_strategy,
    uniform_strategy,
)

P1, P2, C = PlayerRole.PLAYER1, PlayerRole.PLAYER2, PlayerRole.CHANCE


def profile_of(d):
    p = StrategyProfile()
    for k, v in d.items():
        p.set(k, v)
    return p


def test_player_role_has_three_variants():
    assert [r.name for r in PlayerRole] == ["PLAYER1", "PLAYER2", "CHANCE"]
    assert P1.opponent is P2 and P2.opponent is P1
    with pytest.raises(ValueError):
        C.opponent


class TestReachProbability:
    def test_empty_history_is_one(self, pennies, kuhn):
        assert reach_probability(pennies, (), StrategyProfile.uniform(pennies)) == 1.0
        assert reach_probability(kuhn, (), StrategyProfile()) == 1.0

    def test_pennies_leaf_uniform(self, pennies):
        prof = StrategyProfile.uniform(pennies)
        for z in [(0, 0), (0, 1), (1, 0), (1, 1)]:
            assert reach_probability(pennies, z, prof) == pytest.approx(0.25, abs=1e-12)

    def test_exclude_player1_keeps_only_p2_factor(self, pennies):
        prof = StrategyProfile.uniform(pennies)
        assert reach_probability(pennies, (1, 0), prof, exclude=P1) == pytest.approx(0.5, abs=1e-12)

    def test_chance_factor_included_unless_excluded(self, kuhn):
        prof = StrategyProfile.uniform(kuhn)
        h = (2, 1, 0)
        assert reach_probability(kuhn, h, prof) == pytest.approx(1 / 6 * 1 / 4)
        assert reach_probability(kuhn, h, prof, exclude=C) == pytest.approx(1 / 4)
        assert reach_probability(kuhn, h, prof, exclude=P1) == pytest.approx(1 / 12)

    def test_missing_strategy(self, pennies):
        with pytest.raises(MissingStrategyError):
            reach_probability(pennies, (0, 1), StrategyProfile())


class TestInfosetReach:
    def test_root_infoset(self, pennies, routing):
        assert infoset_reach(pennies, InfoKey.of(P1, ""), StrategyProfile.uniform(pennies)) == 1.0
        assert infoset_reach(routing, InfoKey.of(P1, "attack"), StrategyProfile.uniform(routing)) == 1.0

    def test_routing_defender_first_infoset_pools_all_attacks(self, routing):
        assert infoset_reach(routing, InfoKey.of(P2, "S"), StrategyProfile.uniform(routing)) == pytest.approx(1.0)

    def test_kuhn_queen_facing_bet(self, kuhn):
        # frozen from oracles.infoset_reach_bruteforce: deals JQ and KQ, each 1/6 * 1/2
        key = InfoKey.of(P2, "Qb")
        assert infoset_reach(kuhn, key, StrategyProfile.uniform(kuhn)) == pytest.approx(1 / 6, abs=1e-12)

    def test_matches_bruteforce_for_random_profile(self, kuhn):
        strat = random_strategy(kuhn, np.random.default_rng(3))
        prof = profile_of(strat)
        for key in strat:
            assert infoset_reach(kuhn, key, prof) == pytest.approx(
                infoset_reach_bruteforce(kuhn, strat, key), abs=1e-12
            )

    def test_unknown_infoset(self, kuhn):
        with pytest.raises(UnknownInfosetError):
            infoset_reach(kuhn, InfoKey.of(P1, "Xbb"), StrategyProfile.uniform(kuhn))


class TestExpectedValue:
    def test_pennies_uniform_is_zero(self, pennies):
        assert expected_value(pennies, StrategyProfile.uniform(pennies)) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("defender_first", [0, 1])
    @pytest.mark.parametrize("defender_v3", [0, 1])
    def test_routing_constant_attack_v3(self, routing, defender_first, defender_v3):
        prof = StrategyProfile.uniform(routing)
        prof.set(InfoKey.of(P1, "attack"), np.eye(7)[3])
        prof.set(InfoKey.of(P2, "S"), np.eye(2)[defender_first])
        for path in ("S>v1>v3", "S>v2>v3"):
            prof.set(InfoKey.of(P2, path), np.eye(2)[defender_v3])
        assert expected_value(routing, prof, np.full(6, 5.0)) == pytest.approx(5.0, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.0, 0.1, 1 / 3])
    def test_kuhn_equilibrium_value(self, kuhn, alpha):
        prof = profile_of(kuhn_equilibrium(alpha))
        assert expected_value(kuhn, prof) == pytest.approx(-1 / 18, abs=1e-9)

    def test_matches_oracle_random_profile(self, kuhn):
        strat = random_strategy(kuhn, np.random.default_rng(11))
        assert expected_value(kuhn, profile_of(strat)) == pytest.approx(
            expected_payoff(kuhn, strat, np.zeros(0)), abs=1e-12
        )

    def test_monte_carlo_batch_averages_scenarios(self, pennies):
        prof = StrategyProfile.uniform(pennies)
        prof.set(InfoKey.of(P1, ""), [1.0, 0.0])
        prof.set(InfoKey.of(P2, ""), [1.0, 0.0])
        batch = np.array([[1.0], [2.0], [6.0]])
        assert expected_value(pennies, prof, batch) == pytest.approx(3.0)

    def test_scenario_shape_checked(self, routing):
        with pytest.raises(ValueError):
            expected_value(routing, StrategyProfile.uniform(routing), np.zeros(5))


class TestEnumerateInfosets:
    def test_pennies(self, pennies):
        sets = enumerate_infosets(pennies)
        assert {k: len(v) for k, v in sets[P1].items()} == {InfoKey.of(P1, ""): 2}
        assert {k: len(v) for k, v in sets[P2].items()} == {InfoKey.of(P2, ""): 2}

    def test_kuhn_six_per_player(self, kuhn):
        sets = enumerate_infosets(kuhn)
        assert len(sets[P1]) == 6 and len(sets[P2]) == 6
        assert sorted(map(str, sets[P1])) == ["J", "Jpb", "K", "Kpb", "Q", "Qpb"]

    def test_routing_counts(self, routing):
        sets = enumerate_infosets(routing)
        assert list(sets[P1].values()) == [("none", "v1", "v2", "v3", "v4", "v5", "v6")]
        # frozen from the oracle's exhaustive walk: one key per defender path prefix
        assert len(sets[P2]) == 13

    def test_every_decision_history_covered_once(self, kuhn):
        sets = enumerate_infosets(kuhn)
        keys = {k for d in sets.values() for k in d}
        for h in walk_histories(kuhn):
            if not kuhn.is_terminal(h) and kuhn.player_at(h) is not C:
                assert kuhn.info_key(h) in keys

    def test_cycle_is_rejected(self):
        class Loop(Game):
            def is_terminal(self, h):
                return False

            def player_at(self, h):
                return P1

            def legal_actions(self, h):
                return (ActionId(0, "stay"),)

            def successor(self, h, a):
                return h

            def info_key(self, h):
                return InfoKey.of(P1, "")

            def utility(self, player, z, scenario):
                return 0.0

        with pytest.raises(MalformedGameError):
            enumerate_infosets(Loop())


# -- properties ----------------------------------------------------------------

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_zero_sum_every_terminal(seed):
    from hcfr.games import build_kuhn_poker, build_routing_game

    rng = np.random.default_rng(seed)
    for game in (build_kuhn_poker(), build_routing_game()):
        scenario = rng.normal(5, 3, size=game.num_symbols)
        for h in walk_histories(game):
            if game.is_terminal(h):
                assert game.utility(P1, h, scenario) + game.utility(P2, h, scenario) == 0.0


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_reach_decomposes_by_player(seed):
    from hcfr.games import build_kuhn_poker

    game = build_kuhn_poker()
    prof = profile_of(random_strategy(game, np.random.default_rng(seed)))
    for h in walk_histories(game):
        full = reach_probability(game, h, prof)
        for i in (P1, P2, C):
            own = 1.0
            prefix = ()
            for a in h:
                if game.player_at(prefix) is i:
                    own *= (
                        game.chance_probabilities(prefix)[a] if i is C else prof[game.info_key(prefix)][a]
                    )
                prefix = prefix + (a,)
            assert full == pytest.approx(reach_probability(game, h, prof, exclude=i) * own, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_terminal_reach_sums_to_one(seed):
    from hcfr.games import build_kuhn_poker, build_routing_game

    rng = np.random.default_rng(seed)
    for game in (build_kuhn_poker(), build_routing_game()):
        prof = profile_of(random_strategy(game, rng))
        assert sum(r for _, r in terminal_distribution(game, prof)) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, scale=st.floats(min_value=-10, max_value=10, allow_nan=False))
def test_expected_value_linear_in_utilities(seed, scale):
    from hcfr.games import build_routing_game

    game = build_routing_game()
    rng = np.random.default_rng(seed)
    prof = profile_of(random_strategy(game, rng))
    scenario = rng.uniform(0, 10, size=6)
    base = expected_value(game, prof, scenario)
    assert expected_value(game, prof, scale * scenario) == pytest.approx(scale * base, abs=1e-9)


def test_strategy_profile_rejects_non_distribution():
    prof = StrategyProfile()
    with pytest.raises(ValueError):
        prof.set(InfoKey.of(P1, "x"), [0.7, 0.7])
    with pytest.raises(ValueError):
        prof.set(InfoKey.of(P1, "x"), [1.5, -0.5])


def test_uniform_profile_matches_oracle(kuhn):
    uni = StrategyProfile.uniform(kuhn)
    ref = uniform_strategy(kuhn)
    assert set(uni) == set(ref)
    for k in ref:
        np.testing.assert_allclose(uni[k], ref[k])
