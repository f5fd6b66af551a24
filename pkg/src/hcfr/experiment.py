"""Experiment harness: single solves, multi-seed sweeps and payoff sampling.

Everything written here is plain CSV with a header row and ``%.6f`` numbers.
Outputs depend only on the configuration (seed included), never on timing,
so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .cfr import CFRConfig, SolveResult, solve
from .distributions import PayoffModel, parse_models, sample_scenario
from .evaluation import ConvergenceTrace
from .game import (
    STRATEGIC_PLAYERS,
    Game,
    GameError,
    InfoKey,
    PlayerRole,
    StrategyProfile,
    enumerate_infosets,
    walk_histories,
)
from .games import load_game
from .harsanyi import hcfr_solve

QUANTILES = (0.05, 0.25, 0.50, 0.75, 0.95)


class ConfigError(ValueError):
    """Invalid experiment configuration (maps to CLI exit code 2)."""


def fmt(x: float) -> str:
    return "%.6f" % x


@dataclass(frozen=True)
class ExperimentConfig:
    game: str = "routing"
    models: str | None = None
    iterations: int = 500
    seed: int = 0
    runs: int = 1
    exploit_every: int = 0
    out_dir: str = "out"
    alternating: bool = False
    fallback: str = "uniform"
    scenarios_per_iteration: int = 1
    jobs: int = 1

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.exploit_every < 0:
            raise ConfigError("exploit interval must be >= 0")
        if self.scenarios_per_iteration < 1:
            raise ConfigError("scenarios per iteration must be >= 1")

    def cfr_config(self, seed: int | None = None) -> CFRConfig:
        try:
            return CFRConfig(
                alternating=self.alternating,
                fallback=self.fallback,
                exploit_every=self.exploit_every,
                seed=self.seed if seed is None else seed,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class ExperimentResult:
    game: Game
    models: list[PayoffModel]
    result: SolveResult

    @property
    def profile(self) -> StrategyProfile:
        return self.result.profile

    @property
    def trace(self) -> ConvergenceTrace:
        return self.result.trace


def resolve_game(config: ExperimentConfig) -> tuple[Game, list[PayoffModel]]:
    try:
        game = load_game(config.game)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if game.num_symbols == 0:
        if config.models:
            raise ConfigError(f"game {config.game!r} has no uncertain payoffs; drop --model")
        return game, []
    if config.models:
        try:
            return game, parse_models(config.models, game.num_symbols)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    defaults = getattr(game, "payoff_models", None)
    if defaults is None:
        raise ConfigError(f"game {config.game!r} needs --model for its {game.num_symbols} payoff symbols")
    return game, list(defaults)


def solve_config(config: ExperimentConfig, seed: int | None = None) -> ExperimentResult:
    game, models = resolve_game(config)
    cfr_config = config.cfr_config(seed)
    if models:
        result = hcfr_solve(
            game, models, config.iterations, cfr_config,
            scenarios_per_iteration=config.scenarios_per_iteration,
        )
    else:
        result = solve(game, config.iterations, cfr_config)
    return ExperimentResult(game, models, result)


# -- CSV emission ---------------------------------------------------------------


def _ordered_keys(game: Game, player: PlayerRole) -> list[tuple[InfoKey, tuple[str, ...]]]:
    return sorted(enumerate_infosets(game)[player].items(), key=lambda kv: str(kv[0]))


def write_strategy_csv(path: Path, game: Game, profile: StrategyProfile, player: PlayerRole) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["infoset", "action", "probability"])
        for key, labels in _ordered_keys(game, player):
            for label, p in zip(labels, profile[key]):
                writer.writerow([str(key), label, fmt(p)])


def write_trace_csv(path: Path, trace: ConvergenceTrace) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "expected_value", "exploitability"])
        for row in trace:
            eps = "" if row.exploitability is None else fmt(row.exploitability)
            writer.writerow([row.iteration, fmt(row.expected_value), eps])


def strategy_path(out_dir: Path, game: Game, player: PlayerRole) -> Path:
    return out_dir / f"strategy_{game.player_names[player]}.csv"


def load_strategy(game: Game, paths: Sequence[str | Path]) -> StrategyProfile:
    """Read strategy CSVs back into a normalized profile for ``game``.

    A directory expands to its ``strategy_<player>.csv`` files; the owner of a
    file is taken from its name.
    """
    files: list[tuple[Path, PlayerRole]] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            for player in STRATEGIC_PLAYERS:
                f = strategy_path(p, game, player)
                if f.exists():
                    files.append((f, player))
            continue
        if not p.exists():
            raise FileNotFoundError(p)
        stem = p.stem.removeprefix("strategy_")
        if stem not in game.player_names:
            raise ConfigError(f"cannot tell which player {p.name} belongs to; expected strategy_<{'|'.join(game.player_names)}>.csv")
        files.append((p, PlayerRole(game.player_names.index(stem))))
    if not files:
        raise ConfigError("no strategy files found")

    infosets = enumerate_infosets(game)
    profile = StrategyProfile()
    for path, player in files:
        rows: dict[str, dict[str, float]] = {}
        with open(path, newline="") as fh:
            for rec in csv.DictReader(fh):
                rows.setdefault(rec["infoset"], {})[rec["action"]] = float(rec["probability"])
        for key, labels in infosets[player].items():
            entry = rows.get(str(key))
            if entry is None:
                raise ConfigError(f"{path.name} has no row for infoset {str(key)!r}")
            if set(entry) != set(labels):
                raise ConfigError(f"{path.name}: actions {sorted(entry)} do not match {list(labels)} at {str(key)!r}")
            profile.probs[key] = np.array([entry[label] for label in labels])
            profile.labels[key] = labels
    return profile.normalized()


def root_infoset(game: Game, player: PlayerRole = PlayerRole.PLAYER1) -> InfoKey:
    """First ``player`` infoset met in pre-order (the attacker's placement for routing)."""
    for h in walk_histories(game):
        if not game.is_terminal(h) and game.player_at(h) is player:
            return game.info_key(h)
    raise GameError(f"{player.name} never moves")


def format_strategy_table(game: Game, profile: StrategyProfile, player: PlayerRole = PlayerRole.PLAYER1) -> str:
    lines = []
    for key, labels in _ordered_keys(game, player):
        header = f"{game.player_names[player]} @ {str(key) or '<root>'}"
        lines.append(header)
        for label, p in zip(labels, profile[key]):
            lines.append(f"  {label:>10s}  {p:.4f}")
    return "\n".join(lines)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Solve once and write ``strategy_<player>.csv`` and ``trace.csv``."""
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    res = solve_config(config)
    for player in STRATEGIC_PLAYERS:
        write_strategy_csv(strategy_path(out, res.game, player), res.game, res.profile, player)
    write_trace_csv(out / "trace.csv", res.trace)
    return res


# -- sweeps ---------------------------------------------------------------------


@dataclass
class RunSummary:
    seed: int
    values: np.ndarray
    root_labels: tuple[str, ...]
    root_strategy: np.ndarray


def _single_run(config: ExperimentConfig, seed: int) -> RunSummary:
    res = solve_config(replace(config, exploit_every=0), seed)
    key = root_infoset(res.game)
    return RunSummary(seed, res.trace.values, res.profile.labels[key], res.profile[key])


@dataclass
class SweepResult:
    runs: list[RunSummary]
    stats: np.ndarray  # columns: iteration, min, max, mean, stderr


def sweep_runs(config: ExperimentConfig, same_seed: bool = False) -> SweepResult:
    """Run ``config.runs`` independent solves (run j uses seed + j) and aggregate.

    Writes ``sweep.csv`` (per-iteration min/max/mean/standard error of the
    expected value) and ``equilibria.csv`` (each run's final strategy at
    player 1's root infoset).
    """
    if config.runs < 2:
        raise ConfigError("a sweep needs at least 2 runs")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    resolve_game(config)  # fail fast on bad specs before spawning workers
    seeds = [config.seed if same_seed else config.seed + j for j in range(config.runs)]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=min(config.jobs, config.runs)) as pool:
            runs = list(pool.map(_single_run, [config] * len(seeds), seeds))
    else:
        runs = [_single_run(config, s) for s in seeds]

    values = np.stack([r.values for r in runs])
    n = values.shape[0]
    stderr = values.std(axis=0, ddof=1) / math.sqrt(n)
    iterations = np.arange(1, values.shape[1] + 1)
    stats = np.column_stack([iterations, values.min(0), values.max(0), values.mean(0), stderr])

    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "min", "max", "mean", "stderr"])
        for row in stats:
            writer.writerow([int(row[0])] + [fmt(x) for x in row[1:]])
    with open(out / "equilibria.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["run", "seed", *runs[0].root_labels])
        for j, r in enumerate(runs):
            writer.writerow([j, r.seed, *(fmt(p) for p in r.root_strategy)])
    return SweepResult(runs, stats)


# -- payoff sampling ------------------------------------------------------------


def sample_payoffs(
    game: Game,
    models: Sequence[PayoffModel],
    profile: StrategyProfile,
    samples: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Play ``game`` repeatedly under ``profile``, drawing a fresh scenario per play.

    Returns player 1's payoff for every play.
    """
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    out = np.empty(samples)
    fixed = game.default_scenario()
    for n in range(samples):
        scenario = sample_scenario(models, rng) if models else fixed
        h = game.initial_history()
        while not game.is_terminal(h):
            if game.player_at(h) is PlayerRole.CHANCE:
                a = game.sample_chance(h, rng)
            else:
                probs = profile[game.info_key(h)]
                a = int(rng.choice(len(probs), p=probs))
            h = game.successor(h, a)
        out[n] = game.utility(PlayerRole.PLAYER1, h, scenario)
    return out


def sample_payoff_distribution(
    config: ExperimentConfig,
    strategy: Sequence[str | Path],
    samples: int,
) -> np.ndarray:
    """Sample payoffs of a stored strategy and write the samples and their quantiles."""
    game, models = resolve_game(config)
    profile = load_strategy(game, strategy)
    payoffs = sample_payoffs(game, models, profile, samples, np.random.default_rng(config.seed))
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "payoff_samples.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["sample", "payoff"])
        for j, v in enumerate(payoffs):
            writer.writerow([j, fmt(v)])
    with open(out / "payoff_quantiles.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["statistic", "value"])
        for q in QUANTILES:
            writer.writerow([f"q{int(round(q * 100)):02d}", fmt(float(np.quantile(payoffs, q)))])
        writer.writerow(["mean", fmt(float(payoffs.mean()))])
    return payoffs


def env_seed(default: int = 0) -> int:
    raw = os.environ.get("HCFR_SEED")
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"HCFR_SEED must be an integer, got {raw!r}") from None
