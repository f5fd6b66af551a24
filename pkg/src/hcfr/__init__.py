"""Equilibrium approximation for zero-sum extensive-form games with uncertain payoffs."""

from .cfr import CFRConfig, CFRSolver, SolveResult, cfr_iteration, counterfactual_values, solve
from .distributions import (
    Binomial,
    Constant,
    Mixture,
    Normal,
    ScaledBeta,
    Uniform,
    parse_model,
    parse_models,
    sample_scenario,
)
from .evaluation import ConvergenceTrace, best_response_value, exploitability
from .game import (
    ActionId,
    Game,
    InfoKey,
    PlayerRole,
    StrategyProfile,
    enumerate_infosets,
    expected_value,
    infoset_reach,
    reach_probability,
)
from .harsanyi import HarsanyiGame, hcfr_solve, transform

__version__ = "0.1.0"
