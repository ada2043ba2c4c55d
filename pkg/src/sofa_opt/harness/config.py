"""Experiment configuration: YAML file format and problem builders.

A single YAML file fully specifies an experiment: the objective (synthetic
or the migration fitness model), the search box, the optimizer settings, the
repetition/iteration budget, metric thresholds and the reference optimum
policy.  See ``scripts/`` for complete annotated examples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml

from ..core import SofaConfig
from ..domain import SearchDomain, make_domain
from ..dvm import EnvironmentConfig, dvm_domain, dvm_objective
from ..objectives import (
    Objective,
    constant_objective,
    gaussian_bump,
    spiky_objective,
    two_bump,
)
from ..sampler import KernelConfig

DEFAULT_DELTAS = (1e-3, 5e-4)


@dataclass
class ExperimentConfig:
    """Everything needed to run one experiment."""

    name: str = "experiment"
    seed: int = 0
    repetitions: int = 200
    iterations: int = 200_000
    workers: int = 1
    deltas: tuple = DEFAULT_DELTAS
    output_dir: str = "out"
    save_records: bool = True
    unfeasible_window: int = 100
    objective: dict = field(default_factory=lambda: {"kind": "constant", "dim": 2})
    domain: Optional[dict] = None
    sofa: dict = field(default_factory=dict)
    reference: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.deltas = tuple(float(d) for d in self.deltas)
        if any(d <= 0.0 for d in self.deltas):
            raise ValueError("deltas must be positive")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "repetitions": self.repetitions,
            "iterations": self.iterations,
            "workers": self.workers,
            "deltas": list(self.deltas),
            "output_dir": self.output_dir,
            "save_records": self.save_records,
            "unfeasible_window": self.unfeasible_window,
            "objective": self.objective,
            "domain": self.domain,
            "sofa": self.sofa,
            "reference": self.reference,
        }


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    return ExperimentConfig(**data)


def save_config(config: ExperimentConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(config.to_dict(), fh, sort_keys=False)


def build_objective(config: ExperimentConfig) -> Objective:
    spec = dict(config.objective)
    kind = spec.pop("kind", None)
    if kind == "constant":
        return constant_objective(int(spec["dim"]), float(spec.get("value", 1.0)))
    if kind == "gaussian_bump":
        return gaussian_bump(spec["center"], float(spec["width"]))
    if kind == "two_bump":
        return two_bump(
            spec["center1"], float(spec["h1"]),
            spec["center2"], float(spec["h2"]),
            float(spec["width"]),
        )
    if kind == "spiky":
        return spiky_objective(
            spec["center"], float(spec["width"]),
            float(spec.get("ripple", 0.3)), float(spec.get("frequency", 40.0)),
        )
    if kind == "dvm":
        env = EnvironmentConfig.from_dict(spec.get("environment", {}) or {})
        return dvm_objective(env, int(spec["order"]))
    raise ValueError(f"unknown objective kind: {kind!r}")


def build_domain(config: ExperimentConfig) -> SearchDomain:
    spec = dict(config.domain or {})
    kind = spec.pop("kind", "box" if "centers" in spec else None)
    if kind == "box":
        return make_domain(spec["centers"], spec["widths"])
    if kind == "dvm_auto" or (kind is None and config.objective.get("kind") == "dvm"):
        if config.objective.get("kind") != "dvm":
            raise ValueError("domain kind dvm_auto requires a dvm objective")
        return dvm_domain(
            int(config.objective["order"]),
            constant_width=float(spec.get("constant_width", 60.0)),
            harmonic_width=float(spec.get("harmonic_width", 50.0)),
        )
    raise ValueError("domain spec needs centers/widths or kind: dvm_auto")


def build_sofa_config(config: ExperimentConfig, domain: SearchDomain,
                      seed: int, iterations: Optional[int] = None) -> SofaConfig:
    spec = dict(config.sofa)
    kernel = KernelConfig.from_dict(
        spec.pop("kernel", {"variant": "simplified_cauchy"})
    )
    dim = domain.dimension
    spec.setdefault("initial_dims", dim)
    spec.setdefault("dims_block", 0)
    spec.setdefault("max_dims", dim)
    return SofaConfig(
        kernel=kernel,
        max_iterations=int(iterations if iterations is not None else config.iterations),
        seed=int(seed),
        **spec,
    )


def problem_from_config(config: ExperimentConfig):
    """(domain, objective) pair described by the config."""
    objective = build_objective(config)
    domain = build_domain(config)
    if domain.dimension != objective.dim:
        raise ValueError(
            f"domain dimension {domain.dimension} != objective dim {objective.dim}"
        )
    if objective.pad_values is None:
        objective = Objective(
            fn=objective.fn,
            dim=objective.dim,
            known_optimum=objective.known_optimum,
            pad_values=np.asarray(domain.centers, dtype=float),
        )
    return domain, objective
