"""Command-line entry point.

    hcfr solve  --game routing --model binomial:10:0.5 --iters 500 --out runs/binomial
    hcfr sweep  --game routing --model mixture:normal:2.5:1|normal:7.5:1 --runs 50 --jobs 8 --out runs/mix
    hcfr sample --game routing --model ... --strategy runs/mix --samples 10000 --out runs/mix

Exit codes: 0 success, 2 bad configuration, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
import time

from .distributions import ModelSpecError
from .experiment import (
    ConfigError,
    ExperimentConfig,
    env_seed,
    format_strategy_table,
    run_experiment,
    sample_payoff_distribution,
    sweep_runs,
)
from .game import GameError
from .games import NetworkError
from .harsanyi import HarsanyiError

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--game", default="routing", help="preset (routing, kuhn, pennies) or network file")
    p.add_argument("--model", dest="models", default=None,
                   help="payoff model spec(s), comma separated; one spec applies to every symbol")
    p.add_argument("--seed", type=int, default=None, help="base seed (falls back to $HCFR_SEED, then 0)")
    p.add_argument("--out", dest="out_dir", default="out", help="output directory")


def _solver_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iters", dest="iterations", type=int, default=500)
    p.add_argument("--exploit-every", type=int, default=0,
                   help="record exploitability every K iterations (0: never)")
    p.add_argument("--alternating", action="store_true", help="alternate player updates")
    p.add_argument("--fallback", choices=("uniform", "max"), default="uniform",
                   help="strategy when no action has positive regret")
    p.add_argument("--scenarios-per-iter", dest="scenarios_per_iteration", type=int, default=1,
                   help="payoff scenarios averaged per iteration")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hcfr", description="CFR on Harsanyi-transformed games")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="single solve; writes strategy and trace CSVs")
    _common(p)
    _solver_opts(p)

    p = sub.add_parser("sweep", help="independent solves over consecutive seeds")
    _common(p)
    _solver_opts(p)
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("sample", help="payoff distribution of a stored strategy")
    _common(p)
    p.add_argument("--strategy", action="append", required=True,
                   help="solve output directory or strategy_<player>.csv (repeatable)")
    p.add_argument("--samples", type=int, default=10_000)
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    seed = args.seed if args.seed is not None else env_seed()
    fields = {
        "game": args.game,
        "models": args.models,
        "seed": seed,
        "out_dir": args.out_dir,
    }
    for name in ("iterations", "exploit_every", "alternating", "fallback",
                 "scenarios_per_iteration", "runs", "jobs"):
        if hasattr(args, name):
            fields[name] = getattr(args, name)
    return ExperimentConfig(**fields)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config(args)
        if args.command == "solve":
            started = time.perf_counter()
            res = run_experiment(config)
            print(format_strategy_table(res.game, res.profile))
            last = res.trace.rows[-1]
            print(f"iterations {last.iteration}  expected value {last.expected_value:.6f}"
                  + (f"  exploitability {last.exploitability:.6f}" if last.exploitability is not None else ""))
            print(f"wrote {config.out_dir} in {time.perf_counter() - started:.2f}s")
        elif args.command == "sweep":
            res = sweep_runs(config)
            final = res.stats[-1]
            print(f"{len(res.runs)} runs, T={int(final[0])}: mean {final[3]:.6f}  stderr {final[4]:.6f}"
                  f"  range [{final[1]:.6f}, {final[2]:.6f}]")
        else:
            payoffs = sample_payoff_distribution(config, args.strategy, args.samples)
            print(f"{payoffs.size} samples: mean {payoffs.mean():.6f}  sd {payoffs.std():.6f}")
    except (ConfigError, ModelSpecError, NetworkError, HarsanyiError, GameError) as exc:
        print(f"hcfr: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"hcfr: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
