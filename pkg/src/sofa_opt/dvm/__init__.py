"""Zooplankton diel-vertical-migration fitness model."""

from .environment import (
    EnvironmentConfig,
    Infeasible,
    StageRates,
    daylight,
    food_at,
    light_at,
    stage_rates,
)
from .fitness import (
    characteristic_residual,
    characteristic_rhs,
    demo_piecewise_seed,
    dominant_eigenvalue,
    dvm_domain,
    dvm_objective,
    fitness,
)
from .trajectory import (
    STAGES,
    FourierTrajectory,
    PiecewiseTrajectory,
    StagePiecewise,
    eval_fourier,
    eval_fourier_derivative,
    eval_piecewise,
    fourier_of_piecewise,
)

__all__ = [
    "STAGES",
    "EnvironmentConfig",
    "FourierTrajectory",
    "Infeasible",
    "PiecewiseTrajectory",
    "StagePiecewise",
    "StageRates",
    "characteristic_residual",
    "characteristic_rhs",
    "daylight",
    "demo_piecewise_seed",
    "dominant_eigenvalue",
    "dvm_domain",
    "dvm_objective",
    "eval_fourier",
    "eval_fourier_derivative",
    "eval_piecewise",
    "fitness",
    "food_at",
    "fourier_of_piecewise",
    "light_at",
    "stage_rates",
]
