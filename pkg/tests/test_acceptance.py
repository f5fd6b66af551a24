"""Acceptance suite: one PASS/FAIL line per criterion, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines are printed
at the end of the session. ``python3 tests/test_acceptance.py`` does the same.
"""

import csv
import time

import numpy as np
import pytest

from hcfr.cfr import CFRConfig, CFRSolver, cfr_iteration, solve
from hcfr.cli import main
from hcfr.distributions import PRESET_MODELS, Constant
from hcfr.evaluation import exploitability
from hcfr.experiment import ExperimentConfig, run_experiment, sweep_runs
from hcfr.game import InfoKey, PlayerRole, expected_value
from hcfr.games import build_kuhn_poker, build_matching_pennies, build_routing_game, enumerate_routes, example_network
from hcfr.harsanyi import hcfr_solve
from oracles import MatrixGame, counterfactual_regrets

P1, P2 = PlayerRole.PLAYER1, PlayerRole.PLAYER2
ATTACK = InfoKey.of(P1, "attack")
OUTSIDE = ("none", "v1", "v2", "v4", "v5")
MODEL_ORDER = ("binomial", "uniform", "normal", "beta", "mixture")

RESULTS: list[str] = []


def report(n: int, ok: bool, detail: str) -> None:
    RESULTS.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def attacker_row(profile):
    labels = profile.labels[ATTACK]
    return dict(zip(labels, profile[ATTACK]))


def solve_model(name, tmp_path):
    cfg = ExperimentConfig(models=PRESET_MODELS[name].spec(), iterations=500, seed=0,
                           out_dir=str(tmp_path / name))
    start = time.perf_counter()
    res = run_experiment(cfg)
    return res, time.perf_counter() - start


@pytest.fixture(scope="module")
def preset_solves(tmp_path_factory):
    base = tmp_path_factory.mktemp("preset_solves")
    return {name: solve_model(name, base) for name in MODEL_ORDER}


def test_criterion_1_binomial_support(preset_solves):
    res, secs = preset_solves["binomial"]
    row = attacker_row(res.profile)
    support = row["v3"] + row["v6"]
    worst = max(row[k] for k in OUTSIDE)
    report(1, support >= 0.98 and worst <= 0.01 and secs <= 10,
           f"v3={row['v3']:.4f} v6={row['v6']:.4f} v3+v6={support:.4f} max outside={worst:.4f} time={secs:.2f}s")


def test_criterion_2_all_models_support(preset_solves):
    parts, ok, total = [], True, 0.0
    for name in MODEL_ORDER:
        res, secs = preset_solves[name]
        row = attacker_row(res.profile)
        support = row["v3"] + row["v6"]
        outside = 1.0 - support
        ok &= support >= 0.98 and outside <= 0.02
        total += secs
        parts.append(f"{name}={support:.4f}")
    report(2, ok and total <= 60, " ".join(parts) + f" time={total:.2f}s")


def test_criterion_3_expected_value(preset_solves):
    parts, ok = [], True
    for name in MODEL_ORDER:
        res, _ = preset_solves[name]
        ev = res.trace.rows[-1].expected_value
        lo, hi = (4.8, 5.2) if name in ("binomial", "uniform", "normal") else (4.5, 5.5)
        ok &= lo <= ev <= hi
        parts.append(f"{name}={ev:.4f}")
    report(3, ok, " ".join(parts))


@pytest.mark.slow
def test_criterion_4_mixture_sweep(tmp_path):
    import os

    cfg = ExperimentConfig(models=PRESET_MODELS["mixture"].spec(), iterations=500, runs=50, seed=0,
                           jobs=os.cpu_count() or 1, out_dir=str(tmp_path))
    start = time.perf_counter()
    res = sweep_runs(cfg)
    secs = time.perf_counter() - start
    se50, se500 = res.stats[49, 4], res.stats[499, 4]
    with open(tmp_path / "equilibria.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    hits = sum(float(r["v3"]) + float(r["v6"]) >= 0.98 for r in rows)
    frac = hits / len(rows)
    report(4, se500 < se50 and frac >= 0.96 and secs <= 600,
           f"SE(50)={se50:.5f} SE(500)={se500:.5f} runs on v3+v6 line={hits}/{len(rows)} time={secs:.1f}s")


def test_criterion_5_cfr_oracle():
    kuhn = build_kuhn_poker()
    res = solve(kuhn, 10_000, CFRConfig(track_values=False))
    eps = exploitability(kuhn, res.profile)
    value = expected_value(kuhn, res.profile)
    pennies = build_matching_pennies()
    pres = solve(pennies, 1000)
    dev = max(float(np.abs(pres.profile[k] - 0.5).max()) for k in pres.profile)
    report(5, eps <= 0.01 and abs(value + 1 / 18) <= 0.01 and dev <= 0.02,
           f"kuhn eps={eps:.5f} value={value:.5f} (target {-1/18:.5f}) pennies max dev={dev:.5f}")


def regret_step(game, scenario, seed_regrets):
    solver = CFRSolver(game, scenario=scenario)
    for key, r in seed_regrets.items():
        solver.table.update_regret(key, r)
    for key in solver.table.nodes:
        solver.table.refresh_strategy(key)
    before = {k: n.cumulative_regret.copy() for k, n in solver.table.nodes.items()}
    strategy = {k: n.current_strategy.copy() for k, n in solver.table.nodes.items()}
    cfr_iteration(solver)
    ref = counterfactual_regrets(game, strategy, scenario)
    return max(float(np.abs(solver.table.nodes[k].cumulative_regret - before[k] - ref[k]).max()) for k in ref)


def test_criterion_6_bruteforce_equivalence():
    root1, root2 = InfoKey.of(P1, ""), InfoKey.of(P2, "")
    err_p = regret_step(build_matching_pennies(), np.ones(1), {root1: [0.3, 0.1], root2: [0.0, 0.4]})
    rng = np.random.default_rng(2024)
    matrix = MatrixGame(rng.normal(size=(3, 3)))
    err_m = regret_step(matrix, np.zeros(0), {root1: rng.uniform(0, 1, 3), root2: rng.uniform(0, 1, 3)})
    report(6, err_p <= 1e-9 and err_m <= 1e-9, f"max |delta| pennies={err_p:.2e} random 3x3={err_m:.2e}")


def test_criterion_7_harsanyi_degeneracy():
    routing = build_routing_game()
    config = CFRConfig(seed=5)
    plain = solve(routing, 200, config, scenario=np.full(6, 5.0))
    wrapped = hcfr_solve(routing, [Constant(5)] * 6, 200, config)
    same = set(plain.profile) == set(wrapped.profile) and all(
        plain.profile[k].tobytes() == wrapped.profile[k].tobytes() for k in plain.profile
    ) and plain.trace.values.tobytes() == wrapped.trace.values.tobytes()
    report(7, same, f"{len(plain.profile)} infosets compared bitwise")


def test_criterion_8_routes():
    expected = [
        ("S", "v1", "v3", "v5", "v4", "v6", "T"),
        ("S", "v1", "v3", "v6", "T"),
        ("S", "v2", "v3", "v5", "v4", "v6", "T"),
        ("S", "v2", "v3", "v6", "T"),
    ]
    routes = enumerate_routes(example_network())
    report(8, routes == expected, " | ".join(">".join(r) for r in routes))


def test_criterion_9_determinism(tmp_path):
    argv = ["solve", "--model", PRESET_MODELS["mixture"].spec(), "--iters", "100", "--seed", "9",
            "--exploit-every", "25"]
    codes = [main(argv + ["--out", str(tmp_path / d)]) for d in ("a", "b")]
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes() for f in files)
    report(9, codes == [0, 0] and same and len(files) == 3, f"{len(files)} CSVs byte-identical={same}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
