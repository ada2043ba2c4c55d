"""Configurable water-column environment and the derived stage rates.

The published stage-rate integrals live in prior work on the underlying
population model, so this module provides a self-contained, configurable
stand-in with the same qualitative structure: light-driven visual predation
decaying with depth, a shallow food layer grazed only while moving slowly at
shallow depth, metabolic costs of basal maintenance and swimming, and energy
budgets that set maturation times and egg production.  All constants are
plain config fields; the defaults define the demo environment used by the
experiment scripts and tests.

Units: time in days (t in [0, 1] spans one day, t = 0 midnight), depth in
meters, energy in arbitrary daily units, rates per day.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .trajectory import FourierTrajectory, fourier_basis, fourier_derivative_basis

HOURS_PER_DAY = 24.0


@dataclass(frozen=True)
class Infeasible:
    """Marks a trajectory whose derived rates are biologically invalid."""

    reason: str


@dataclass(frozen=True)
class StageRates:
    """Demographic rates entering the characteristic equation.

    Mortalities a_* are per day; tau_y < tau_j are the ages (days) at which
    the young and juvenile stages mature; tau_a is the maximal reproduction
    age; b is eggs per female per day.  All must be non-negative and finite.
    """

    a_y: float
    a_j: float
    a_a: float
    tau_y: float
    tau_j: float
    tau_a: float
    b: float

    def __post_init__(self):
        values = (self.a_y, self.a_j, self.a_a, self.tau_y, self.tau_j, self.tau_a, self.b)
        if not all(math.isfinite(v) and v >= 0.0 for v in values):
            raise ValueError(f"stage rates must be finite and non-negative: {values}")
        if not self.tau_y < self.tau_j < self.tau_a:
            raise ValueError(
                f"need tau_y < tau_j < tau_a, got {self.tau_y}, {self.tau_j}, {self.tau_a}"
            )


@dataclass(frozen=True)
class EnvironmentConfig:
    """Demo water column; every constant is overridable.

    Feeding happens only at depths within ``feeding_depth_max`` of the
    surface while the vertical speed stays below ``feeding_speed_max_m_per_h``
    (10 m/h by default).  Stage tuples are ordered (Y, J, A).
    """

    # Light: half-sinusoid daylight (dark half the day) times exponential
    # attenuation with depth.
    light_peak: float = 1.0
    light_attenuation: float = 0.08          # 1/m
    # Mortality per day: background + visual predation at full surface light,
    # plus a penalty rate per meter spent outside [0, max_depth].
    visual_predation: tuple = (1.5, 4.0, 6.0)
    background_mortality: tuple = (0.10, 0.05, 0.04)
    boundary_mortality: float = 0.1          # per day per meter of violation
    max_depth: float = 200.0
    # Food: Gaussian layer centered near the surface, zero above the surface.
    food_peak_depth: float = 5.0
    food_width: float = 20.0
    # Feeding rule thresholds.
    feeding_depth_max: float = 50.0
    feeding_speed_max_m_per_h: float = 10.0
    # Energetics (per day): intake at food density 1, basal maintenance,
    # swimming cost per meter traveled.
    intake_rate: tuple = (4.0, 5.5, 9.0)
    basal_cost: tuple = (0.6, 0.8, 0.8)
    swim_cost: float = 0.002
    # Energy totals required to mature out of Y and J.
    maturation_energy: tuple = (8.0, 15.0)
    # Eggs per unit of net adult energy, and the adult reproductive span.
    egg_conversion: float = 2.0
    adult_span: float = 30.0
    # Positive fitness transform J = exp(lambda * fitness_scale).
    fitness_scale: float = 1.0
    # Fixed midpoint-rule resolution for the daily integrals.
    time_samples: int = 512

    def __post_init__(self):
        for name in ("visual_predation", "background_mortality", "intake_rate",
                     "basal_cost", "maturation_energy"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        if len(self.visual_predation) != 3 or len(self.background_mortality) != 3:
            raise ValueError("mortality tuples must have one entry per stage")
        if len(self.intake_rate) != 3 or len(self.basal_cost) != 3:
            raise ValueError("energy tuples must have one entry per stage")
        if len(self.maturation_energy) != 2:
            raise ValueError("maturation_energy covers stages Y and J only")
        numeric = (
            self.light_peak, self.light_attenuation, self.boundary_mortality,
            self.max_depth, self.food_width, self.feeding_depth_max,
            self.feeding_speed_max_m_per_h, self.swim_cost,
            self.egg_conversion, self.adult_span,
        )
        if any(v < 0.0 for v in numeric):
            raise ValueError("environment constants must be non-negative")
        if self.adult_span <= 0.0:
            raise ValueError("adult_span must be positive")
        if self.time_samples < 8:
            raise ValueError("time_samples must be >= 8")

    @property
    def feeding_speed_max(self) -> float:
        """Feeding speed threshold in m/day."""
        return self.feeding_speed_max_m_per_h * HOURS_PER_DAY

    def to_dict(self) -> dict:
        return {
            "light_peak": self.light_peak,
            "light_attenuation": self.light_attenuation,
            "visual_predation": list(self.visual_predation),
            "background_mortality": list(self.background_mortality),
            "boundary_mortality": self.boundary_mortality,
            "max_depth": self.max_depth,
            "food_peak_depth": self.food_peak_depth,
            "food_width": self.food_width,
            "feeding_depth_max": self.feeding_depth_max,
            "feeding_speed_max_m_per_h": self.feeding_speed_max_m_per_h,
            "intake_rate": list(self.intake_rate),
            "basal_cost": list(self.basal_cost),
            "swim_cost": self.swim_cost,
            "maturation_energy": list(self.maturation_energy),
            "egg_conversion": self.egg_conversion,
            "adult_span": self.adult_span,
            "fitness_scale": self.fitness_scale,
            "time_samples": self.time_samples,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EnvironmentConfig":
        return cls(**data)


def daylight(t):
    """Relative surface irradiance over the scaled day (0 at night, 1 midday)."""
    return np.maximum(0.0, -np.cos(2.0 * np.pi * np.asarray(t, dtype=float)))


def light_at(env: EnvironmentConfig, t, depth):
    """Irradiance at (t, depth); depth is clamped at the surface."""
    z = np.maximum(np.asarray(depth, dtype=float), 0.0)
    return env.light_peak * daylight(t) * np.exp(-env.light_attenuation * z)


def food_at(env: EnvironmentConfig, depth):
    """Food density: Gaussian layer below the surface, zero above it."""
    z = np.asarray(depth, dtype=float)
    layer = np.exp(-((z - env.food_peak_depth) ** 2) / (2.0 * env.food_width**2))
    return np.where(z >= 0.0, layer, 0.0)


@lru_cache(maxsize=8)
def _grid_and_bases(n: int, time_samples: int):
    t = (np.arange(time_samples) + 0.5) / time_samples
    return t, fourier_basis(n, t), fourier_derivative_basis(n, t)


@lru_cache(maxsize=8)
def _env_arrays(env: EnvironmentConfig):
    """Per-stage constant vectors plus the daylight profile on the grid."""
    t, _, _ = _grid_and_bases(1, env.time_samples)
    return (
        np.asarray(env.background_mortality),
        np.asarray(env.visual_predation),
        np.asarray(env.intake_rate),
        np.asarray(env.basal_cost),
        env.light_peak * daylight(t),
    )


def stage_rates(traj: FourierTrajectory, env: EnvironmentConfig):
    """Daily-average demographic rates of a trajectory, or Infeasible.

    Mortality a_i averages background, light-dependent visual predation at
    the stage's depth and the out-of-bounds penalty.  Net daily energy is
    feeding intake (inside the depth/speed window) minus basal and swimming
    costs; non-positive net energy for any stage makes the trajectory
    infeasible (maturation would never complete, or egg output would be
    negative).
    """
    _, basis, dbasis = _grid_and_bases(traj.n, env.time_samples)
    bg, vis, intake_rate, basal, sunlight = _env_arrays(env)
    depth = traj.coefficients @ basis      # (3, T)
    speed = traj.coefficients @ dbasis     # (3, T), m per day

    exposure = np.exp(-env.light_attenuation * np.maximum(depth, 0.0)) * sunlight
    violation = np.maximum(-depth, 0.0) + np.maximum(depth - env.max_depth, 0.0)
    mortality = (
        bg
        + vis * exposure.mean(axis=1)
        + env.boundary_mortality * violation.mean(axis=1)
    )

    abs_speed = np.abs(speed)
    # food_at is zero above the surface, so the depth >= 0 gate is implicit.
    feeding = (depth <= env.feeding_depth_max) & (abs_speed <= env.feeding_speed_max)
    grazing = np.where(feeding, food_at(env, depth), 0.0).mean(axis=1)
    intake = intake_rate * grazing
    swim = env.swim_cost * abs_speed.mean(axis=1)
    net = intake - basal - swim

    if net[0] <= 0.0:
        return Infeasible("non-positive net energy for stage Y")
    if net[1] <= 0.0:
        return Infeasible("non-positive net energy for stage J")
    if net[2] <= 0.0:
        return Infeasible("non-positive net energy for stage A")

    tau_y = float(env.maturation_energy[0] / net[0])
    tau_j = tau_y + float(env.maturation_energy[1] / net[1])
    tau_a = tau_j + env.adult_span
    b = float(env.egg_conversion * net[2])
    if not all(math.isfinite(v) for v in (tau_y, tau_j, tau_a, b, *mortality)):
        return Infeasible("non-finite derived rate")
    return StageRates(
        a_y=float(mortality[0]),
        a_j=float(mortality[1]),
        a_a=float(mortality[2]),
        tau_y=float(tau_y),
        tau_j=float(tau_j),
        tau_a=float(tau_a),
        b=float(b),
    )
