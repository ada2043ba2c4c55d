"""Error and convergence-probability metrics over repeated runs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def function_error(j_star: float, j_best: float) -> float:
    """Reference optimum minus best found fitness.

    A negative result means the run beat the stored reference; it is
    reported as-is because it signals a stale reference optimum.
    """
    return float(j_star) - float(j_best)


def convergence_probability(records, j_star: float, delta: float, iteration: int) -> float:
    """Fraction of runs whose best-so-far at ``iteration`` is within delta."""
    if not records:
        raise ValueError("need at least one run record")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    hits = 0
    for rec in records:
        best = rec.best_fitness[iteration - 1]
        if np.isfinite(best) and abs(j_star - best) < delta:
            hits += 1
    return hits / len(records)


def format_delta(delta: float) -> str:
    """Compact scientific form used in CSV column names: 1e-3, 5e-4, ..."""
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    exponent = math.floor(math.log10(delta) + 1e-12)
    mantissa = delta / 10.0**exponent
    mantissa = round(mantissa, 9)
    if abs(mantissa - round(mantissa)) < 1e-9:
        mantissa_str = str(int(round(mantissa)))
    else:
        mantissa_str = repr(mantissa)
    return f"{mantissa_str}e{exponent}"


@dataclass
class MetricSeries:
    """Per-iteration experiment metrics aggregated across repetitions.

    ``p_delta`` maps each threshold to its per-iteration convergence
    probability; every probability series is non-decreasing because it is
    computed on best-so-far fitness.
    """

    iterations: np.ndarray
    mean_err: np.ndarray
    p_delta: dict
    unfeasible_frac: np.ndarray
    unfeasible_windowed: np.ndarray
    window: int
    j_star: float

    @property
    def n_iterations(self) -> int:
        return int(self.iterations.size)


def aggregate_records(records, j_star: float, deltas, window: int = 100) -> MetricSeries:
    """Reduce a list of run records into a MetricSeries.

    Runs are truncated to the shortest length present (relevant only when a
    dispersion-termination criterion fired).  The unfeasible fraction at
    iteration i is the share of runs whose iteration i needed at least one
    infeasible evaluation; the windowed series is its trailing moving
    average.
    """
    if not records:
        raise ValueError("need at least one run record")
    k = min(rec.n_iterations for rec in records)
    best = np.stack([rec.best_fitness[:k] for rec in records])
    infeasible = np.stack([rec.infeasible_evals[:k] > 0 for rec in records])

    with np.errstate(invalid="ignore"):
        mean_err = np.nanmean(j_star - best, axis=0)
    p_delta = {}
    for delta in deltas:
        within = np.isfinite(best) & (np.abs(j_star - best) < delta)
        p_delta[float(delta)] = within.mean(axis=0)
    unfeasible_frac = infeasible.mean(axis=0)
    csum = np.concatenate([[0.0], np.cumsum(unfeasible_frac)])
    idx = np.arange(1, k + 1)
    start = np.maximum(idx - window, 0)
    unfeasible_windowed = (csum[idx] - csum[start]) / (idx - start)
    return MetricSeries(
        iterations=idx,
        mean_err=mean_err,
        p_delta=p_delta,
        unfeasible_frac=unfeasible_frac,
        unfeasible_windowed=unfeasible_windowed,
        window=window,
        j_star=float(j_star),
    )


def metrics_header(deltas) -> str:
    cols = ["iteration", "mean_err"]
    cols += [f"p_{format_delta(d)}" for d in deltas]
    cols.append("unfeasible_frac")
    return ",".join(cols)


def write_metrics_csv(series: MetricSeries, path) -> None:
    """Write the per-iteration metrics table; output is byte-deterministic."""
    deltas = sorted(series.p_delta, reverse=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(metrics_header(deltas) + "\n")
        for i in range(series.n_iterations):
            row = [str(int(series.iterations[i])), repr(float(series.mean_err[i]))]
            row += [repr(float(series.p_delta[d][i])) for d in deltas]
            row.append(repr(float(series.unfeasible_frac[i])))
            fh.write(",".join(row) + "\n")


def write_windowed_csv(series: MetricSeries, path) -> None:
    """Companion table: trailing moving average of the unfeasible fraction."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"iteration,unfeasible_frac_w{series.window}\n")
        for i in range(series.n_iterations):
            fh.write(
                f"{int(series.iterations[i])},{float(series.unfeasible_windowed[i])!r}\n"
            )
