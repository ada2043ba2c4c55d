"""Daily depth trajectories for the three developmental stages.

A trajectory assigns a depth in meters to every scaled time t in [0, 1]
(t = 0 is midnight, t = 0.5 midday), for each of the stages Y (young),
J (juvenile) and A (adult).  Two representations are used: a truncated
Fourier series (the optimization variables) and a symmetric piecewise-linear
profile (seed strategies and reference shapes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

STAGES = ("Y", "J", "A")


def stage_index(stage) -> int:
    if isinstance(stage, str):
        try:
            return STAGES.index(stage.upper())
        except ValueError:
            raise ValueError(f"unknown stage {stage!r}, expected one of {STAGES}") from None
    i = int(stage)
    if not 0 <= i <= 2:
        raise ValueError(f"stage index out of range: {i}")
    return i


@dataclass(frozen=True)
class FourierTrajectory:
    """Per-stage Fourier coefficients, shape (3, n) with n = 2N + 1 odd.

    Row layout per stage: [constant, sin(2*pi*t), cos(2*pi*t),
    sin(4*pi*t), cos(4*pi*t), ...].  The flat concatenation (Y row, then J,
    then A) is the optimization vector of dimension 3n.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 2 or c.shape[0] != 3:
            raise ValueError(f"coefficients must have shape (3, n), got {c.shape}")
        if c.shape[1] % 2 != 1:
            raise ValueError(f"n = {c.shape[1]} must be odd (n = 2N + 1)")
        object.__setattr__(self, "coefficients", c)

    @property
    def n(self) -> int:
        return int(self.coefficients.shape[1])

    @property
    def order(self) -> int:
        return (self.n - 1) // 2

    @property
    def dimension(self) -> int:
        return 3 * self.n

    def flat(self) -> np.ndarray:
        return self.coefficients.ravel().copy()

    @classmethod
    def from_flat(cls, values) -> "FourierTrajectory":
        v = np.asarray(values, dtype=float).ravel()
        if v.size % 3 != 0 or (v.size // 3) % 2 != 1:
            raise ValueError(f"flat vector length {v.size} is not 3 * (2N + 1)")
        return cls(v.reshape(3, -1))

    def phase_shift(self, phi: float) -> "FourierTrajectory":
        """Coefficients of t -> v(t + phi): an exact rotation per harmonic."""
        c = self.coefficients
        out = c.copy()
        for m in range(1, self.order + 1):
            cm = np.cos(2.0 * np.pi * m * phi)
            sm = np.sin(2.0 * np.pi * m * phi)
            a = c[:, 2 * m - 1]
            b = c[:, 2 * m]
            out[:, 2 * m - 1] = a * cm - b * sm
            out[:, 2 * m] = a * sm + b * cm
        return FourierTrajectory(out)


def eval_fourier(traj: FourierTrajectory, stage, t):
    """Depth of a stage at scaled time(s) t in [0, 1].

    The series is periodic; t is wrapped modulo 1 so v(1) == v(0) exactly.
    """
    s = stage_index(stage)
    c = traj.coefficients[s]
    t_arr = np.mod(np.asarray(t, dtype=float), 1.0)
    value = np.full_like(t_arr, c[0])
    for m in range(1, traj.order + 1):
        angle = 2.0 * np.pi * m * t_arr
        value = value + c[2 * m - 1] * np.sin(angle) + c[2 * m] * np.cos(angle)
    return value if value.shape else float(value)


def eval_fourier_derivative(traj: FourierTrajectory, stage, t):
    """Analytic time derivative (m per scaled day) of a stage trajectory."""
    s = stage_index(stage)
    c = traj.coefficients[s]
    t_arr = np.mod(np.asarray(t, dtype=float), 1.0)
    value = np.zeros_like(t_arr)
    for m in range(1, traj.order + 1):
        w = 2.0 * np.pi * m
        angle = w * t_arr
        value = value + w * (c[2 * m - 1] * np.cos(angle) - c[2 * m] * np.sin(angle))
    return value if value.shape else float(value)


def fourier_basis(n: int, t_grid: np.ndarray) -> np.ndarray:
    """Basis matrix B with B[0] = 1, B[2m-1] = sin(2 pi m t), B[2m] = cos(...).

    ``coefficients @ B`` evaluates all stages on the grid at once.
    """
    if n % 2 != 1:
        raise ValueError("n must be odd")
    B = np.empty((n, t_grid.size))
    B[0] = 1.0
    for m in range(1, (n - 1) // 2 + 1):
        angle = 2.0 * np.pi * m * t_grid
        B[2 * m - 1] = np.sin(angle)
        B[2 * m] = np.cos(angle)
    return B


def fourier_derivative_basis(n: int, t_grid: np.ndarray) -> np.ndarray:
    B = np.zeros((n, t_grid.size))
    for m in range(1, (n - 1) // 2 + 1):
        w = 2.0 * np.pi * m
        angle = w * t_grid
        B[2 * m - 1] = w * np.cos(angle)
        B[2 * m] = -w * np.sin(angle)
    return B


@dataclass(frozen=True)
class StagePiecewise:
    """Symmetric five-piece daily profile for one stage.

    shallow at [0, t0), linear descent to deep on [t0, t1), deep on
    [t1, t2), linear ascent on [t2, t3), shallow again on [t3, 1].  The
    profile must be symmetric about t = 0.5 (t2 = 1 - t1, t3 = 1 - t0);
    descent/ascent speeds follow from continuity.
    """

    shallow: float
    deep: float
    t0: float
    t1: float
    t2: float
    t3: float

    def __post_init__(self):
        if not 0.0 <= self.t0 < self.t1 < self.t2 < self.t3 <= 1.0:
            raise ValueError(
                f"phase times must satisfy 0 <= t0 < t1 < t2 < t3 <= 1, got "
                f"({self.t0}, {self.t1}, {self.t2}, {self.t3})"
            )
        if not 0.0 <= self.shallow <= self.deep:
            raise ValueError("need 0 <= shallow <= deep")
        if abs(self.t2 - (1.0 - self.t1)) > 1e-9 or abs(self.t3 - (1.0 - self.t0)) > 1e-9:
            raise ValueError("profile must be symmetric about t = 0.5")

    @classmethod
    def symmetric(cls, shallow: float, deep: float, t0: float, t1: float) -> "StagePiecewise":
        return cls(shallow=shallow, deep=deep, t0=t0, t1=t1, t2=1.0 - t1, t3=1.0 - t0)

    @property
    def descent_speed(self) -> float:
        return (self.deep - self.shallow) / (self.t1 - self.t0)

    @property
    def ascent_speed(self) -> float:
        return (self.shallow - self.deep) / (self.t3 - self.t2)

    def depth(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = np.full_like(t_arr, self.shallow)
        out = np.where(
            (t_arr >= self.t0) & (t_arr < self.t1),
            self.descent_speed * (t_arr - self.t0) + self.shallow,
            out,
        )
        out = np.where((t_arr >= self.t1) & (t_arr < self.t2), self.deep, out)
        out = np.where(
            (t_arr >= self.t2) & (t_arr < self.t3),
            self.ascent_speed * (t_arr - self.t2) + self.deep,
            out,
        )
        return out if out.shape else float(out)

    def time_average(self) -> float:
        flat_shallow = self.t0 + (1.0 - self.t3)
        flat_deep = self.t2 - self.t1
        ramps = (self.t1 - self.t0) + (self.t3 - self.t2)
        return (
            self.shallow * flat_shallow
            + self.deep * flat_deep
            + 0.5 * (self.shallow + self.deep) * ramps
        )


@dataclass(frozen=True)
class PiecewiseTrajectory:
    """One symmetric piecewise profile per stage (Y, J, A)."""

    stages: tuple

    def __post_init__(self):
        if len(self.stages) != 3 or not all(
            isinstance(s, StagePiecewise) for s in self.stages
        ):
            raise ValueError("stages must be three StagePiecewise profiles")


def eval_piecewise(traj: PiecewiseTrajectory, stage, t):
    """Depth of a stage of the piecewise profile at time(s) t in [0, 1]."""
    return traj.stages[stage_index(stage)].depth(t)


def fourier_of_piecewise(traj: PiecewiseTrajectory, order: int) -> FourierTrajectory:
    """Fourier coefficients of each stage profile, by numeric quadrature.

    The constant term is the time average; harmonic m gets
    2 * integral(v(t) sin(2 pi m t)) and 2 * integral(v(t) cos(2 pi m t)).
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    n = 2 * order + 1
    coeffs = np.zeros((3, n))
    for s, piece in enumerate(traj.stages):
        breaks = [piece.t0, piece.t1, piece.t2, piece.t3]
        coeffs[s, 0] = quad(piece.depth, 0.0, 1.0, points=breaks, limit=200)[0]
        for m in range(1, order + 1):
            w = 2.0 * np.pi * m
            coeffs[s, 2 * m - 1] = 2.0 * quad(
                lambda t: piece.depth(t) * np.sin(w * t), 0.0, 1.0,
                points=breaks, limit=200,
            )[0]
            coeffs[s, 2 * m] = 2.0 * quad(
                lambda t: piece.depth(t) * np.cos(w * t), 0.0, 1.0,
                points=breaks, limit=200,
            )[0]
    return FourierTrajectory(coeffs)
