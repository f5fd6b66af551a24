"""Payoff uncertainty models and joint scenario sampling.

Every model is an immutable value object. Randomness always comes from a
caller-owned :class:`numpy.random.Generator`, so a (seed, model) pair fixes
the full draw sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np


class ModelSpecError(ValueError):
    """Invalid payoff model parameters or an unparsable textual spec."""


@dataclass(frozen=True)
class Constant:
    value: float

    def sample(self, rng: np.random.Generator) -> float:
        return float(self.value)

    def mean(self) -> float:
        return float(self.value)

    def variance(self) -> float:
        return 0.0

    def spec(self) -> str:
        return f"const:{_fmt(self.value)}"


@dataclass(frozen=True)
class Binomial:
    n: int
    p: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ModelSpecError(f"binomial n must be a positive integer, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ModelSpecError(f"binomial p must lie in [0, 1], got {self.p}")

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.binomial(self.n, self.p))

    def mean(self) -> float:
        return self.n * self.p

    def variance(self) -> float:
        return self.n * self.p * (1.0 - self.p)

    def spec(self) -> str:
        return f"binomial:{self.n}:{_fmt(self.p)}"


@dataclass(frozen=True)
class Normal:
    mu: float
    sd: float

    def __post_init__(self):
        if not self.sd > 0:
            raise ModelSpecError(f"normal sd must be positive, got {self.sd}")

    def sample(self, rng: np.random.Generator) -> float:
        # no truncation: negative draws are legitimate payoffs
        return float(rng.normal(self.mu, self.sd))

    def mean(self) -> float:
        return float(self.mu)

    def variance(self) -> float:
        return self.sd**2

    def spec(self) -> str:
        return f"normal:{_fmt(self.mu)}:{_fmt(self.sd)}"


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ModelSpecError(f"uniform needs lo < hi, got ({self.lo}, {self.hi})")

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.lo, self.hi))

    def mean(self) -> float:
        return (self.lo + self.hi) / 2.0

    def variance(self) -> float:
        return (self.hi - self.lo) ** 2 / 12.0

    def spec(self) -> str:
        return f"uniform:{_fmt(self.lo)}:{_fmt(self.hi)}"


@dataclass(frozen=True)
class ScaledBeta:
    """``scale * Beta(alpha, beta)``, supported on ``[0, scale]``."""

    scale: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.scale > 0 and self.alpha > 0 and self.beta > 0):
            raise ModelSpecError(
                f"beta needs positive scale/alpha/beta, got ({self.scale}, {self.alpha}, {self.beta})"
            )

    def sample(self, rng: np.random.Generator) -> float:
        return float(self.scale * rng.beta(self.alpha, self.beta))

    def mean(self) -> float:
        return self.scale * self.alpha / (self.alpha + self.beta)

    def variance(self) -> float:
        a, b = self.alpha, self.beta
        return self.scale**2 * a * b / ((a + b) ** 2 * (a + b + 1.0))

    def spec(self) -> str:
        return f"beta:{_fmt(self.scale)}:{_fmt(self.alpha)}:{_fmt(self.beta)}"


@dataclass(frozen=True)
class Mixture:
    components: tuple[tuple[float, "PayoffModel"], ...]

    def __post_init__(self):
        if not self.components:
            raise ModelSpecError("mixture needs at least one component")
        weights = [w for w, _ in self.components]
        if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
            raise ModelSpecError(f"mixture weights must be non-negative and sum to 1, got {weights}")

    @classmethod
    def equal(cls, *models: "PayoffModel") -> "Mixture":
        w = 1.0 / len(models)
        return cls(tuple((w, m) for m in models))

    def sample(self, rng: np.random.Generator) -> float:
        weights = [w for w, _ in self.components]
        idx = int(rng.choice(len(self.components), p=weights))
        return self.components[idx][1].sample(rng)

    def mean(self) -> float:
        return math.fsum(w * m.mean() for w, m in self.components)

    def variance(self) -> float:
        mu = self.mean()
        return math.fsum(w * (m.variance() + (m.mean() - mu) ** 2) for w, m in self.components)

    def spec(self) -> str:
        equal = len({w for w, _ in self.components}) == 1
        parts = [m.spec() if equal else f"{_fmt(w)}*{m.spec()}" for w, m in self.components]
        return "mixture:" + "|".join(parts)


PayoffModel = Union[Constant, Binomial, Normal, Uniform, ScaledBeta, Mixture]


def sample(model: PayoffModel, rng: np.random.Generator) -> float:
    return model.sample(rng)


def mean(model: PayoffModel) -> float:
    return model.mean()


def sample_scenario(models: Sequence[PayoffModel], rng: np.random.Generator) -> np.ndarray:
    """One independent draw per model, in declared order."""
    if len(models) == 0:
        raise ModelSpecError("at least one payoff model is required")
    return np.array([m.sample(rng) for m in models], dtype=np.float64)


def scenario_means(models: Sequence[PayoffModel]) -> np.ndarray:
    return np.array([m.mean() for m in models], dtype=np.float64)


# Table of named payoff models used in the routing experiments. All share mean 5.
PRESET_MODELS: dict[str, PayoffModel] = {
    "binomial": Binomial(10, 0.5),
    "uniform": Uniform(0.0, 10.0),
    "normal": Normal(5.0, 1.0),
    "beta": ScaledBeta(10.0, 0.5, 0.5),
    "mixture": Mixture.equal(Normal(2.5, 1.0), Normal(7.5, 1.0)),
}


def parse_model(text: str) -> PayoffModel:
    """Parse the textual model mini-language.

    >>> parse_model("binomial:10:0.5")
    Binomial(n=10, p=0.5)
    >>> parse_model("mixture:normal:2.5:1|normal:7.5:1").mean()
    5.0

    Mixture components may carry a ``<weight>*`` prefix; without one the
    weights are equal.
    """
    text = text.strip()
    kind, _, rest = text.partition(":")
    kind = kind.lower()
    if kind == "mixture":
        if not rest:
            raise ModelSpecError(f"empty mixture spec: {text!r}")
        parts = rest.split("|")
        weighted = []
        for part in parts:
            w_text, star, body = part.partition("*")
            if star:
                weighted.append((_num(w_text, text), parse_model(body)))
            else:
                weighted.append((None, parse_model(part)))
        if all(w is None for w, _ in weighted):
            return Mixture.equal(*(m for _, m in weighted))
        if any(w is None for w, _ in weighted):
            raise ModelSpecError(f"mix of weighted and unweighted components: {text!r}")
        return Mixture(tuple(weighted))  # type: ignore[arg-type]

    args = [_num(a, text) for a in rest.split(":")] if rest else []
    arity = {"const": 1, "constant": 1, "binomial": 2, "normal": 2, "uniform": 2, "beta": 3}
    if kind not in arity:
        raise ModelSpecError(f"unknown payoff model {kind!r} in {text!r}")
    if len(args) != arity[kind]:
        raise ModelSpecError(f"{kind} takes {arity[kind]} parameters, got {len(args)} in {text!r}")
    if kind in ("const", "constant"):
        return Constant(args[0])
    if kind == "binomial":
        if args[0] != int(args[0]):
            raise ModelSpecError(f"binomial n must be an integer in {text!r}")
        return Binomial(int(args[0]), args[1])
    if kind == "normal":
        return Normal(*args)
    if kind == "uniform":
        return Uniform(*args)
    return ScaledBeta(*args)


def parse_models(text: str, count: int | None = None) -> list[PayoffModel]:
    """Comma-separated specs; a single spec is broadcast to ``count`` symbols."""
    models = [parse_model(part) for part in text.split(",") if part.strip()]
    if not models:
        raise ModelSpecError("no payoff model given")
    if count is not None:
        if len(models) == 1:
            models = models * count
        elif len(models) != count:
            raise ModelSpecError(f"game has {count} payoff symbols but {len(models)} models were given")
    return models


def _num(text: str, context: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ModelSpecError(f"bad number {text!r} in {context!r}") from None


def _fmt(x: float) -> str:
    return format(float(x), "g")
