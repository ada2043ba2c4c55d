"""Population fitness of a migration strategy via the dominant eigenvalue.

The stage-structured renewal model reduces to a scalar transcendental
equation for the growth exponent lambda:

    lambda = b * exp(-a_y*tau_y - a_j*(tau_j - tau_y))
               * [exp(-tau_j*lambda) - exp(-tau_a*lambda - a_j*(tau_a - tau_j))]
             - a_a

The largest real root is taken as the fitness exponent.  Because the
optimizer requires strictly positive objectives and lambda can be negative,
the objective value is the monotone transform J = exp(lambda * scale), which
preserves every argmax.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from ..domain import SearchDomain, make_domain
from ..objectives import FitnessOutcome, Objective
from .environment import EnvironmentConfig, Infeasible, StageRates, stage_rates
from .trajectory import (
    FourierTrajectory,
    PiecewiseTrajectory,
    StagePiecewise,
    fourier_of_piecewise,
)

RESIDUAL_TOL = 1e-10

_EXP_MAX = 700.0


def _exp(x: float) -> float:
    """Scalar exp saturating to inf instead of raising OverflowError."""
    return math.exp(x) if x < _EXP_MAX else math.inf


def _scalar_residual(lam: float, b_survival: float, tau_j: float, span: float,
                     a_j: float, a_a: float) -> float:
    """g(lambda) with precomputed b * survival factor; plain-float hot path."""
    inner = -span * (lam + a_j)
    bracket = _exp(-tau_j * lam) * (-math.expm1(inner) if inner < _EXP_MAX else -math.inf)
    return b_survival * bracket - a_a - lam


def _scalar_residual_prime(lam: float, b_survival: float, tau_j: float,
                           span: float, a_j: float, tau_a: float) -> float:
    """dg/dlambda on the same plain-float path."""
    return (
        b_survival * (-tau_j * _exp(-tau_j * lam)
                      + tau_a * _exp(-tau_a * lam - a_j * span))
        - 1.0
    )


def _polish_root(a: float, b: float, fa: float, f, fprime) -> float:
    """Safeguarded Newton inside a sign-changing bracket [a, b].

    Newton steps are accepted only while they stay inside the shrinking
    bracket; anything else falls back to bisection, so convergence is
    certified while simple roots still converge quadratically.
    """
    x = 0.5 * (a + b)
    for _ in range(200):
        fx = f(x)
        if fx == 0.0:
            return x
        if (fa < 0.0) == (fx < 0.0):
            a, fa = x, fx
        else:
            b = x
        if b - a <= 4.0 * math.ulp(max(abs(a), abs(b), 1.0)):
            break
        d = fprime(x)
        if math.isfinite(d) and d != 0.0:
            x_new = x - fx / d
            if not a < x_new < b:
                x_new = 0.5 * (a + b)
        else:
            x_new = 0.5 * (a + b)
        x = x_new
    return 0.5 * (a + b)


def characteristic_rhs(lam, rates: StageRates):
    """Right-hand side of the characteristic equation at lambda.

    The bracketed difference is evaluated in the factored form
    exp(-tau_j*lam) * (1 - exp(-(tau_a - tau_j) * (lam + a_j))), which is
    algebraically identical but avoids inf - inf at very negative lambda.
    """
    lam = np.asarray(lam, dtype=float)
    span = rates.tau_a - rates.tau_j
    growth_survival = np.exp(-rates.a_y * rates.tau_y - rates.a_j * (rates.tau_j - rates.tau_y))
    with np.errstate(over="ignore"):
        bracket = np.exp(-rates.tau_j * lam) * (-np.expm1(-span * (lam + rates.a_j)))
        out = rates.b * growth_survival * bracket - rates.a_a
    return out if out.shape else float(out)


def characteristic_residual(lam, rates: StageRates):
    """g(lambda) = rhs(lambda) - lambda; roots of g are the eigenvalues."""
    lam = np.asarray(lam, dtype=float)
    out = characteristic_rhs(lam, rates) - lam
    return out if out.shape else float(out)


@lru_cache(maxsize=8)
def _scan_grid(lam_lo: float, lam_hi: float, scan_points: int) -> np.ndarray:
    grid = np.linspace(lam_lo, lam_hi, scan_points)
    grid.flags.writeable = False
    return grid


def dominant_eigenvalue(
    rates: StageRates,
    lam_lo: float = -10.0,
    lam_hi: float = 10.0,
    scan_points: int = 512,
) -> Union[float, Infeasible]:
    """Largest real root of the characteristic equation in [lam_lo, lam_hi].

    A uniform scan locates the rightmost sign change of g, which a
    safeguarded Newton-in-bracket polish refines to |g| < 1e-10.  With b = 0
    the equation collapses to lambda = -a_a, returned exactly.  No sign
    change in the bracket means no real eigenvalue there (the strategy is
    demographically unviable).
    """
    if rates.b == 0.0:
        return -rates.a_a
    span = rates.tau_a - rates.tau_j
    b_survival = rates.b * math.exp(
        -rates.a_y * rates.tau_y - rates.a_j * (rates.tau_j - rates.tau_y)
    )
    grid = _scan_grid(float(lam_lo), float(lam_hi), int(scan_points))
    with np.errstate(over="ignore", invalid="ignore"):
        g = (
            b_survival
            * np.exp(-rates.tau_j * grid)
            * (-np.expm1(-span * (grid + rates.a_j)))
            - rates.a_a
            - grid
        )
        finite = np.isfinite(g)
        sign_change = finite[:-1] & finite[1:] & (np.sign(g[:-1]) * np.sign(g[1:]) <= 0.0)
    idx = np.nonzero(sign_change)[0]
    if idx.size == 0:
        exact = np.nonzero(finite & (g == 0.0))[0]
        if exact.size:
            return float(grid[exact[-1]])
        return Infeasible(
            f"no real eigenvalue: g has no sign change on [{lam_lo}, {lam_hi}]"
        )
    i = int(idx[-1])
    f = lambda lam: _scalar_residual(lam, b_survival, rates.tau_j, span,
                                     rates.a_j, rates.a_a)
    fprime = lambda lam: _scalar_residual_prime(lam, b_survival, rates.tau_j,
                                                span, rates.a_j, rates.tau_a)
    root = _polish_root(float(grid[i]), float(grid[i + 1]), float(g[i]), f, fprime)
    if abs(f(root)) > RESIDUAL_TOL:
        return Infeasible("eigenvalue polish failed to reach residual tolerance")
    return float(root)


def fitness(traj: FourierTrajectory, env: EnvironmentConfig) -> FitnessOutcome:
    """Positive fitness of a trajectory: exp(dominant eigenvalue * scale).

    Infeasibility from the stage rates or from a missing real eigenvalue
    propagates as an infeasible outcome.
    """
    rates = stage_rates(traj, env)
    if isinstance(rates, Infeasible):
        return FitnessOutcome.infeasible(rates.reason)
    lam = dominant_eigenvalue(rates)
    if isinstance(lam, Infeasible):
        return FitnessOutcome.infeasible(lam.reason)
    return FitnessOutcome.feasible(float(np.exp(lam * env.fitness_scale)))


def demo_piecewise_seed() -> PiecewiseTrajectory:
    """Deep-migration seed strategy: young stay shallow, older stages dive."""
    return PiecewiseTrajectory(
        stages=(
            StagePiecewise.symmetric(shallow=6.0, deep=7.0, t0=0.22, t1=0.34),
            StagePiecewise.symmetric(shallow=8.0, deep=70.0, t0=0.20, t1=0.32),
            StagePiecewise.symmetric(shallow=8.0, deep=90.0, t0=0.18, t1=0.31),
        )
    )


def dvm_domain(
    order: int,
    seed: Optional[PiecewiseTrajectory] = None,
    constant_width: float = 60.0,
    harmonic_width: float = 50.0,
) -> SearchDomain:
    """Coefficient box centered on the Fourier expansion of a seed strategy.

    Harmonic widths shrink as harmonic_width / m, mirroring the coefficient
    decay of the smooth strategies the box is meant to cover (and keeping the
    box a credible finite section of a square-summable-width cube).
    """
    if seed is None:
        seed = demo_piecewise_seed()
    centers = fourier_of_piecewise(seed, order).flat()
    n = 2 * order + 1
    widths_stage = np.empty(n)
    widths_stage[0] = constant_width
    for m in range(1, order + 1):
        widths_stage[2 * m - 1] = harmonic_width / m
        widths_stage[2 * m] = harmonic_width / m
    widths = np.tile(widths_stage, 3)
    return make_domain(centers, widths)


@lru_cache(maxsize=4)
def _cached_env_objective(env: EnvironmentConfig, n: int):
    def fn(flat: np.ndarray) -> FitnessOutcome:
        return fitness(FourierTrajectory(flat.reshape(3, n)), env)

    return fn


def dvm_objective(
    env: EnvironmentConfig,
    order: int,
    pad_values=None,
) -> Objective:
    """Objective over flat coefficient vectors of dimension 3 * (2*order + 1)."""
    n = 2 * order + 1
    pv = None if pad_values is None else np.asarray(pad_values, dtype=float)
    return Objective(fn=_cached_env_objective(env, n), dim=3 * n, pad_values=pv)
