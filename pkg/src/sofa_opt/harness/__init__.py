"""Experiment orchestration, metrics and the command-line interface."""

from .config import (
    ExperimentConfig,
    build_domain,
    build_objective,
    build_sofa_config,
    load_config,
    problem_from_config,
    save_config,
)
from .density import density_moments, export_density_evolution, write_density_csv
from .experiment import (
    derive_run_seeds,
    estimate_reference_optimum,
    resolve_reference,
    run_experiment,
)
from .metrics import (
    MetricSeries,
    aggregate_records,
    convergence_probability,
    format_delta,
    function_error,
    metrics_header,
    write_metrics_csv,
    write_windowed_csv,
)

__all__ = [
    "ExperimentConfig",
    "MetricSeries",
    "aggregate_records",
    "build_domain",
    "build_objective",
    "build_sofa_config",
    "convergence_probability",
    "density_moments",
    "derive_run_seeds",
    "estimate_reference_optimum",
    "export_density_evolution",
    "format_delta",
    "function_error",
    "load_config",
    "metrics_header",
    "problem_from_config",
    "resolve_reference",
    "run_experiment",
    "save_config",
    "write_density_csv",
    "write_metrics_csv",
    "write_windowed_csv",
]
