"""Positive objectives: the outcome/objective types, synthetic test functions
with known optima, and a uniform-random-search baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import RunRecord
from .domain import SearchDomain


@dataclass(frozen=True)
class FitnessOutcome:
    """Either a strictly positive fitness value or an infeasibility tag."""

    value: Optional[float]
    reason: Optional[str] = None

    @property
    def is_feasible(self) -> bool:
        return self.value is not None

    @staticmethod
    def feasible(value: float) -> "FitnessOutcome":
        value = float(value)
        if not value > 0.0 or not math.isfinite(value):
            raise ValueError(f"feasible fitness must be finite and positive, got {value}")
        return FitnessOutcome(value=value)

    @staticmethod
    def infeasible(reason: str) -> "FitnessOutcome":
        return FitnessOutcome(value=None, reason=reason)


@dataclass(frozen=True)
class Objective:
    """A positive objective over vectors of length ``dim``.

    ``evaluate`` accepts vectors of length <= dim; missing trailing
    coordinates are padded with ``pad_values`` (zeros when not given).  The
    optimizer itself always pads with the domain centers before calling in,
    so the objective-side padding only matters for direct use.  Objectives
    are pure functions and safe to evaluate concurrently.
    """

    fn: Callable[[np.ndarray], FitnessOutcome]
    dim: int
    known_optimum: Optional[tuple] = None  # (coords, value)
    pad_values: Optional[np.ndarray] = None

    def evaluate(self, x) -> FitnessOutcome:
        v = np.asarray(x, dtype=float).ravel()
        if v.size > self.dim:
            raise ValueError(f"point length {v.size} exceeds objective dim {self.dim}")
        if v.size < self.dim:
            full = (
                self.pad_values.astype(float).copy()
                if self.pad_values is not None
                else np.zeros(self.dim)
            )
            full[: v.size] = v
            v = full
        return self.fn(v)


def constant_objective(dim: int, value: float = 1.0) -> Objective:
    """J identically equal to ``value``; selection degenerates to uniform."""
    out = FitnessOutcome.feasible(value)
    return Objective(fn=lambda z: out, dim=dim)


# exp() underflows to exactly 0 below roughly -745; positivity of the
# synthetic objectives is preserved by flooring the exponent well above that.
_EXPONENT_FLOOR = -700.0


def gaussian_bump(center, width: float) -> Objective:
    """J(z) = exp(-||z - center||^2 / width^2), unique maximum 1 at center."""
    c = np.asarray(center, dtype=float).ravel()
    if not width > 0.0:
        raise ValueError("width must be positive")
    w2 = float(width) ** 2

    def fn(z):
        d = z - c
        return FitnessOutcome.feasible(
            math.exp(max(-np.dot(d, d) / w2, _EXPONENT_FLOOR))
        )

    return Objective(fn=fn, dim=c.size, known_optimum=(c.copy(), 1.0))


def two_bump(center1, h1: float, center2, h2: float, width: float) -> Objective:
    """Sum of two Gaussian bumps: global max ~h1 at center1, local ~h2 at center2.

    Requires h1 > h2 > 0 and center separation > 3 * width so the bumps do
    not merge.
    """
    c1 = np.asarray(center1, dtype=float).ravel()
    c2 = np.asarray(center2, dtype=float).ravel()
    if c1.size != c2.size:
        raise ValueError("centers must have equal length")
    if not (h1 > h2 > 0.0):
        raise ValueError("need h1 > h2 > 0")
    if not width > 0.0:
        raise ValueError("width must be positive")
    sep = float(np.linalg.norm(c1 - c2))
    if sep <= 3.0 * width:
        raise ValueError(f"centers separated by {sep:.3g} <= 3*width = {3 * width:.3g}")
    w2 = float(width) ** 2

    def fn(z):
        d1 = z - c1
        d2 = z - c2
        v = h1 * math.exp(max(-np.dot(d1, d1) / w2, _EXPONENT_FLOOR)) + h2 * math.exp(
            max(-np.dot(d2, d2) / w2, _EXPONENT_FLOOR)
        )
        return FitnessOutcome.feasible(v)

    # The cross term at center1 is bounded by h2*exp(-9), so center1 is the
    # global maximizer up to that magnitude when sep > 3*width.
    peak = h1 + h2 * np.exp(-(sep / width) ** 2)
    return Objective(fn=fn, dim=c1.size, known_optimum=(c1.copy(), float(peak)))


def spiky_objective(center, width: float, ripple: float = 0.3,
                    frequency: float = 40.0) -> Objective:
    """Gaussian bump with a high-frequency ripple along the first coordinate.

    Stress objective: positive and continuous but oscillatory, so local
    methods stall.  Excluded from hard acceptance.
    """
    c = np.asarray(center, dtype=float).ravel()
    if not 0.0 <= ripple < 1.0:
        raise ValueError("ripple must lie in [0, 1)")
    w2 = float(width) ** 2

    def fn(z):
        d = z - c
        base = math.exp(max(-np.dot(d, d) / w2, _EXPONENT_FLOOR))
        v = base * (1.0 + ripple * np.sin(frequency * (z[0] - c[0]))) + 1e-12
        return FitnessOutcome.feasible(float(v))

    return Objective(fn=fn, dim=c.size)


def random_search_baseline(domain: SearchDomain, objective, iterations: int,
                           seed: int) -> RunRecord:
    """Uniform i.i.d. sampling over the full domain, same record format.

    Stands in for external comparison methods.  Infeasible draws are counted
    but never stored; best-so-far stays NaN until the first feasible draw.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    rng = np.random.default_rng(seed)
    D = domain.dimension
    lo, hi = domain.lower, domain.upper
    coords = np.tile(domain.centers, (iterations, 1))
    dims = np.full(iterations, D, dtype=np.int64)
    fitness = np.full(iterations, np.nan)
    floored = np.zeros(iterations, dtype=bool)
    infeasible = np.zeros(iterations, dtype=np.int64)
    best_fitness = np.full(iterations, np.nan)
    best_index = np.zeros(iterations, dtype=np.int64)
    best = -np.inf
    bi = 0
    for i in range(iterations):
        point = rng.uniform(lo, hi)
        coords[i] = point
        outcome = objective.evaluate(point)
        if outcome.is_feasible:
            fitness[i] = outcome.value
            if outcome.value > best:
                best, bi = float(outcome.value), i
        else:
            infeasible[i] = 1
        if np.isfinite(best):
            best_fitness[i] = best
        best_index[i] = bi
    return RunRecord(
        coords=coords,
        dims=dims,
        fitness=fitness,
        floored=floored,
        infeasible_evals=infeasible,
        best_fitness=best_fitness,
        best_index=best_index,
        out_of_domain_count=0,
        terminated_early=False,
        seed=seed,
    )
