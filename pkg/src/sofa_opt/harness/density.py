"""Export of the proposal-density evolution along one coordinate.

At a checkpoint k the density of the next proposal's coordinate j is the
selection-weighted mixture of the per-trial kernels (total probability law).
As the run converges the mixture collapses toward a point mass at the best
coordinate, which these tables make visible to external plotting tools.
"""

from __future__ import annotations

import numpy as np

from ..core import RunRecord, SofaConfig, proposal_density
from ..domain import SearchDomain


def export_density_evolution(
    record: RunRecord,
    j: int,
    checkpoints,
    domain: SearchDomain,
    config: SofaConfig,
    grid_points: int = 200,
):
    """Long-format table (checkpoint, x, density) on a uniform coordinate grid.

    Returns (rows, grid) where rows is a float array of shape
    (len(checkpoints) * grid_points, 3).
    """
    if not 0 <= j < domain.dimension:
        raise ValueError(f"coordinate {j} out of range")
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    if np.any(~np.isfinite(record.fitness)) or np.any(record.fitness <= 0.0):
        raise ValueError("density export needs a record of feasible trials")
    grid = np.linspace(float(domain.lower[j]), float(domain.upper[j]), grid_points)
    rows = np.empty((len(checkpoints) * grid_points, 3))
    for c, k in enumerate(checkpoints):
        k = int(k)
        if not 1 <= k <= record.n_iterations:
            raise ValueError(f"checkpoint {k} outside 1..{record.n_iterations}")
        dens = proposal_density(
            record.coords[:k], record.fitness[:k], k, j, grid, domain, config
        )
        block = slice(c * grid_points, (c + 1) * grid_points)
        rows[block, 0] = k
        rows[block, 1] = grid
        rows[block, 2] = dens
    return rows, grid


def density_moments(rows: np.ndarray):
    """Mean and standard deviation of each checkpoint's density table."""
    out = {}
    for k in np.unique(rows[:, 0]):
        sel = rows[rows[:, 0] == k]
        x, dens = sel[:, 1], sel[:, 2]
        dx = x[1] - x[0]
        mass = float(np.sum(dens) * dx)
        mean = float(np.sum(x * dens) * dx / mass)
        var = float(np.sum((x - mean) ** 2 * dens) * dx / mass)
        out[int(k)] = {"mass": mass, "mean": mean, "std": float(np.sqrt(var))}
    return out


def write_density_csv(rows: np.ndarray, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("iteration,x,density\n")
        for k, x, dens in rows:
            fh.write(f"{int(k)},{float(x)!r},{float(dens)!r}\n")
