"""The survival-of-the-fittest iteration loop.

Every iteration keeps the entire history of feasible trials alive.  One of
them is chosen as the reference (parent) with probability proportional to
fitness raised to the iteration count, a mutation kernel centered on that
reference proposes the next trial inside the current projection of the search
box, and the new evaluation joins the history.  Selection pressure grows with
the iteration count, so the proposal mixture localizes around the best point
found; the mutation kernel shrinks on its own schedule.

Selection weights are always computed in the log domain (shifted by the
maximum log-fitness).  The ratio form J_i^k / sum_j J_j^k overflows in naive
arithmetic beyond k of order 1e3, while the shifted form is exact up to
floating-point rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domain import SearchDomain, contains
from .sampler import (
    BASIC_GAUSSIAN,
    KernelConfig,
    _tg_ppf_aligned,
    epsilon_schedule,
    gaussian_sigma,
    sample_truncated_cauchy,
    sample_truncated_gaussian,
    truncated_cauchy_pdf,
    truncated_gaussian_pdf,
)

REJECT_RESAMPLE = "reject_resample"
FLOOR_FITNESS = "floor_fitness"


class SofaRunError(RuntimeError):
    """Raised when a run cannot proceed (e.g. no feasible starting point)."""


@dataclass(frozen=True)
class TrialPoint:
    """A single evaluated point: coordinates, positive fitness, iteration index.

    ``fitness`` is None only for diagnostic use; points stored in a run's
    selection history are always feasible (strictly positive fitness).
    """

    coords: np.ndarray
    fitness: Optional[float]
    iteration: int

    @property
    def is_feasible(self) -> bool:
        return self.fitness is not None


@dataclass(frozen=True)
class SofaConfig:
    """Run settings: kernel, dimension-growth schedule, termination, policies.

    The dimension ladder starts at ``initial_dims`` and adds ``dims_block``
    coordinates every ``growth_interval`` iterations up to ``max_dims``
    (None means the full domain dimension).  With initial_dims=1,
    dims_block=1, growth_interval=1 this reproduces the one-new-dimension-
    per-iteration ladder of the basic algorithm.
    """

    kernel: KernelConfig = field(default_factory=KernelConfig)
    max_iterations: int = 1000
    initial_dims: int = 1
    dims_block: int = 1
    growth_interval: int = 1
    max_dims: Optional[int] = None
    termination_std_threshold: Optional[float] = None
    termination_window: int = 500
    infeasible_policy: str = REJECT_RESAMPLE
    max_retries: int = 100
    fitness_floor: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.initial_dims < 1:
            raise ValueError("initial_dims must be >= 1")
        if self.dims_block < 0:
            raise ValueError("dims_block must be >= 0")
        if self.growth_interval < 1:
            raise ValueError("growth_interval must be >= 1")
        if self.max_dims is not None and self.max_dims < self.initial_dims:
            raise ValueError("max_dims must be >= initial_dims")
        if self.infeasible_policy not in (REJECT_RESAMPLE, FLOOR_FITNESS):
            raise ValueError(f"unknown infeasible policy: {self.infeasible_policy!r}")
        if self.fitness_floor is not None and not self.fitness_floor > 0.0:
            raise ValueError("fitness_floor must be positive when given")
        if self.termination_window < 2:
            raise ValueError("termination_window must be >= 2")

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.to_dict(),
            "max_iterations": self.max_iterations,
            "initial_dims": self.initial_dims,
            "dims_block": self.dims_block,
            "growth_interval": self.growth_interval,
            "max_dims": self.max_dims,
            "termination_std_threshold": self.termination_std_threshold,
            "termination_window": self.termination_window,
            "infeasible_policy": self.infeasible_policy,
            "max_retries": self.max_retries,
            "fitness_floor": self.fitness_floor,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SofaConfig":
        data = dict(data)
        data["kernel"] = KernelConfig.from_dict(data["kernel"])
        return cls(**data)


@dataclass
class RunRecord:
    """Full trace of one run.

    ``coords`` holds one row per stored trial, padded beyond each trial's
    active dimensionality with the domain centers, so row i is exactly the
    point that was evaluated.  ``best_fitness`` is monotone non-decreasing.
    """

    coords: np.ndarray            # (k, D) center-padded trial coordinates
    dims: np.ndarray              # (k,) active dimensionality at creation
    fitness: np.ndarray           # (k,) strictly positive stored fitness
    floored: np.ndarray           # (k,) True where the floor policy applied
    infeasible_evals: np.ndarray  # (k,) infeasible evaluations per iteration
    best_fitness: np.ndarray      # (k,) best-so-far fitness
    best_index: np.ndarray        # (k,) index of the best-so-far trial
    out_of_domain_count: int
    terminated_early: bool
    seed: int

    @property
    def n_iterations(self) -> int:
        return int(self.fitness.size)

    @property
    def final_best(self) -> TrialPoint:
        i = int(self.best_index[-1])
        return TrialPoint(
            coords=self.coords[i].copy(),
            fitness=float(self.fitness[i]),
            iteration=i + 1,
        )

    def best_coords_at(self, iteration: int) -> np.ndarray:
        """Coordinates of the best trial up to 1-based iteration."""
        return self.coords[int(self.best_index[iteration - 1])].copy()


def selection_weights(fitnesses, k: int) -> np.ndarray:
    """Probability of selecting each stored point: J_i^k / sum_j J_j^k.

    Computed as exp(k * (ln J_i - ln J_max)) then normalized, which is
    mathematically identical and immune to overflow/underflow at large k.
    """
    f = np.asarray(fitnesses, dtype=float).ravel()
    if f.size == 0:
        raise ValueError("fitness vector is empty")
    if np.any(f <= 0.0) or not np.all(np.isfinite(f)):
        raise ValueError("all fitnesses must be finite and strictly positive")
    log_f = np.log(f)
    w = np.exp(k * (log_f - log_f.max()))
    return w / w.sum()


def select_reference(fitnesses, k: int, rng, size=None):
    """Sample a history index with probability J_i^k / sum_j J_j^k."""
    w = selection_weights(fitnesses, k)
    cdf = np.cumsum(w)
    cdf[-1] = 1.0
    if size is None:
        return int(np.searchsorted(cdf, rng.random(), side="right"))
    idx = np.searchsorted(cdf, rng.random(size), side="right")
    return np.minimum(idx, w.size - 1)


def active_dims(config: SofaConfig, k: int, domain_dim: Optional[int] = None) -> int:
    """Dimensions active at iteration k under the block-growth schedule."""
    if k < 1:
        raise ValueError(f"iteration index must be >= 1, got {k}")
    grown = config.initial_dims + config.dims_block * ((k - 1) // config.growth_interval)
    if config.max_dims is not None:
        grown = min(grown, config.max_dims)
    if domain_dim is not None:
        grown = min(grown, domain_dim)
    return int(grown)


def _kernel_draw(mean, domain: SearchDomain, d: int, k: int, config: SofaConfig, rng):
    """Propose d coordinates with the configured kernel centered at ``mean``."""
    lo = domain.lower[:d]
    hi = domain.upper[:d]
    if config.kernel.variant == BASIC_GAUSSIAN:
        sigma = gaussian_sigma(k, domain.diagonal)
        return sample_truncated_gaussian(mean, sigma, lo, hi, rng, size=d)
    eps = epsilon_schedule(k + 1, config.kernel.epsilon_a, config.kernel.epsilon_b)
    return sample_truncated_cauchy(mean, eps, lo, hi, rng.random(d))


def propose(reference: TrialPoint, domain: SearchDomain, k: int,
            config: SofaConfig, rng) -> np.ndarray:
    """Propose the next trial around ``reference`` at iteration k.

    The result has active_dims(config, k+1) coordinates; reference
    coordinates beyond its own length default to the domain centers.
    """
    if k < 1:
        raise ValueError(f"iteration index must be >= 1, got {k}")
    d = active_dims(config, k + 1, domain.dimension)
    ref = np.asarray(reference.coords, dtype=float).ravel()
    mean = domain.centers[:d].copy()
    m = min(ref.size, d)
    mean[:m] = ref[:m]
    return _kernel_draw(mean, domain, d, k, config, rng)


def proposal_density(trials, fitnesses, k: int, j: int, x, domain: SearchDomain,
                     config: SofaConfig):
    """Mixture density of coordinate j of the next proposal, given history.

    By the total probability law this is sum_i w_i(k) * kernel_j(x; center_i)
    where w_i are the selection weights at iteration k and each kernel is
    normalized over coordinate j's interval, so the mixture integrates to 1.
    """
    t = np.asarray(trials, dtype=float)
    if t.ndim == 1:
        t = t[None, :]
    if t.shape[0] == 0:
        raise ValueError("history is empty")
    if j >= t.shape[1]:
        raise ValueError(f"coordinate {j} not present in history rows")
    w = selection_weights(np.asarray(fitnesses, dtype=float)[: t.shape[0]], k)
    lo = float(domain.lower[j])
    hi = float(domain.upper[j])
    x_arr = np.asarray(x, dtype=float)
    centers = t[:, j]
    if config.kernel.variant == BASIC_GAUSSIAN:
        sigma = gaussian_sigma(k, domain.diagonal)
        comp = truncated_gaussian_pdf(
            x_arr[..., None], centers, sigma, lo, hi
        )
    else:
        eps = epsilon_schedule(k + 1, config.kernel.epsilon_a, config.kernel.epsilon_b)
        comp = truncated_cauchy_pdf(x_arr[..., None], centers, eps, lo, hi)
    dens = comp @ w
    return dens if np.ndim(x) else float(dens)


def _evaluate_padded(objective, point: np.ndarray, domain: SearchDomain):
    """Evaluate a (possibly partial) point, padding with domain centers."""
    d = point.size
    dim = getattr(objective, "dim", domain.dimension)
    if d >= dim:
        return objective.evaluate(point[:dim])
    full = domain.centers[:dim].copy()
    full[:d] = point
    return objective.evaluate(full)


def run(domain: SearchDomain, objective, config: SofaConfig) -> RunRecord:
    """Execute one full optimization run and return its trace.

    The first point is uniform on the initial projection.  Each subsequent
    iteration selects a reference among all stored trials, proposes around it
    with the configured kernel and appends the evaluation.  Infeasible
    evaluations never enter the selection history: they are either resampled
    (reject_resample, up to max_retries, then floored) or recorded at a small
    positive floor (floor_fitness).
    """
    rng = np.random.default_rng(config.seed)
    D = domain.dimension
    cap = config.max_dims if config.max_dims is not None else D
    if cap > D:
        raise ValueError(f"max_dims {cap} exceeds domain dimension {D}")
    K = config.max_iterations

    coords = np.tile(domain.centers, (K, 1))
    dims = np.zeros(K, dtype=np.int64)
    fitness = np.empty(K, dtype=float)
    log_fitness = np.empty(K, dtype=float)
    floored = np.zeros(K, dtype=bool)
    infeasible_evals = np.zeros(K, dtype=np.int64)
    best_fitness = np.empty(K, dtype=float)
    best_index = np.zeros(K, dtype=np.int64)
    out_of_domain = 0

    window = config.termination_window
    recent_first = np.empty(window, dtype=float)
    n_recent = 0

    # First trial: uniform on the initial projection, resampled while
    # infeasible; aborting here is a configuration-level failure.
    d0 = active_dims(config, 1, D)
    lo0, hi0 = domain.lower[:d0], domain.upper[:d0]
    outcome = None
    point = None
    for attempt in range(config.max_retries + 1):
        point = rng.uniform(lo0, hi0)
        outcome = _evaluate_padded(objective, point, domain)
        if outcome.is_feasible:
            break
        infeasible_evals[0] += 1
    if outcome is None or not outcome.is_feasible:
        raise SofaRunError(
            f"no feasible starting point after {config.max_retries + 1} uniform "
            f"draws on the initial {d0}-dimensional projection; last reason: "
            f"{outcome.reason if outcome is not None else 'none'}"
        )
    coords[0, :d0] = point
    dims[0] = d0
    fitness[0] = outcome.value
    log_fitness[0] = math.log(outcome.value)
    best_fitness[0] = outcome.value
    best_index[0] = 0
    recent_first[n_recent % window] = point[0]
    n_recent += 1

    terminated_early = False
    lower_full = domain.lower
    upper_full = domain.upper
    gaussian = config.kernel.variant == BASIC_GAUSSIAN
    eps_a, eps_b = config.kernel.epsilon_a, config.kernel.epsilon_b
    diagonal = domain.diagonal
    cdf_buf = np.empty(K)
    dims_ladder = np.minimum(
        config.initial_dims
        + config.dims_block * (np.arange(K, dtype=np.int64) // config.growth_interval),
        cap,
    )

    # History kept sorted by log-fitness (ascending): weights are
    # exp(k * (lnJ - lnJmax)), which underflows to exactly 0.0 in float64
    # once lnJ falls more than ~746/k below the max, so only the suffix
    # above that cutoff can ever be selected.  Restricting the exp/cumsum
    # to the suffix is exact, not an approximation.
    sorted_logf = np.empty(K)
    perm = np.empty(K, dtype=np.int64)
    sorted_logf[0] = log_fitness[0]
    perm[0] = 0

    k = 1
    while k < K:
        # k stored trials so far; propose trial k+1.
        log_max = sorted_logf[k - 1]
        start = int(np.searchsorted(sorted_logf[:k], log_max - 746.0 / k))
        active = sorted_logf[start:k]
        cdf = cdf_buf[: k - start]
        np.subtract(active, log_max, out=cdf)
        cdf *= k
        np.exp(cdf, out=cdf)
        np.cumsum(cdf, out=cdf)
        d_next = int(dims_ladder[k])
        lo, hi = lower_full[:d_next], upper_full[:d_next]
        if gaussian:
            sigma = gaussian_sigma(k, diagonal)
        else:
            scale = math.sqrt(epsilon_schedule(k + 1, eps_a, eps_b))

        attempts = 0
        while True:
            pick = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
            if pick >= cdf.size:
                pick = cdf.size - 1
            ref_idx = int(perm[start + pick])
            mean = coords[ref_idx, :d_next]
            if gaussian:
                proposal = _tg_ppf_aligned(rng.random(d_next), mean, sigma, lo, hi)
            else:
                theta_lo = np.arctan((lo - mean) / scale)
                theta_hi = np.arctan((hi - mean) / scale)
                proposal = mean + scale * np.tan(
                    theta_lo + rng.random(d_next) * (theta_hi - theta_lo)
                )
                np.clip(proposal, lo, hi, out=proposal)
            if (proposal < lo).any() or (proposal > hi).any():
                out_of_domain += 1
            recent_first[n_recent % window] = proposal[0]
            n_recent += 1
            outcome = _evaluate_padded(objective, proposal, domain)
            if outcome.is_feasible:
                value = float(outcome.value)
                break
            infeasible_evals[k] += 1
            attempts += 1
            resample = (
                config.infeasible_policy == REJECT_RESAMPLE
                and attempts <= config.max_retries
            )
            if not resample:
                floor = config.fitness_floor
                if floor is None:
                    floor = 1e-12 * best_fitness[k - 1]
                value = float(floor)
                floored[k] = True
                break

        coords[k, :d_next] = proposal
        dims[k] = d_next
        fitness[k] = value
        log_value = math.log(value)
        log_fitness[k] = log_value
        pos = int(np.searchsorted(sorted_logf[:k], log_value))
        sorted_logf[pos + 1 : k + 1] = sorted_logf[pos:k]
        sorted_logf[pos] = log_value
        perm[pos + 1 : k + 1] = perm[pos:k]
        perm[pos] = k
        if value > best_fitness[k - 1]:
            best_fitness[k] = value
            best_index[k] = k
        else:
            best_fitness[k] = best_fitness[k - 1]
            best_index[k] = best_index[k - 1]
        k += 1

        if (
            config.termination_std_threshold is not None
            and n_recent >= window
            and float(np.std(recent_first)) < config.termination_std_threshold
        ):
            terminated_early = True
            break

    return RunRecord(
        coords=coords[:k],
        dims=dims[:k],
        fitness=fitness[:k],
        floored=floored[:k],
        infeasible_evals=infeasible_evals[:k],
        best_fitness=best_fitness[:k],
        best_index=best_index[:k],
        out_of_domain_count=out_of_domain,
        terminated_early=terminated_early,
        seed=config.seed,
    )


# ---------------------------------------------------------------------------
# Record serialization: one trial per line, with a JSON header carrying the
# domain and kernel so a record file is self-describing.
# ---------------------------------------------------------------------------

_RECORD_MAGIC = "#sofa-record"


def save_record(record: RunRecord, path, domain: SearchDomain,
                config: Optional[SofaConfig] = None) -> None:
    """Write a run record: header line then `iter fitness dims floored n_inf x...`."""
    header = {
        "version": 1,
        "seed": record.seed,
        "out_of_domain_count": record.out_of_domain_count,
        "terminated_early": record.terminated_early,
        "domain": domain.to_dict(),
    }
    if config is not None:
        header["sofa"] = config.to_dict()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{_RECORD_MAGIC} {json.dumps(header, sort_keys=True)}\n")
        for i in range(record.n_iterations):
            d = int(record.dims[i])
            xs = " ".join(repr(float(v)) for v in record.coords[i, :d])
            fh.write(
                f"{i + 1} {float(record.fitness[i])!r} {d} "
                f"{int(record.floored[i])} {int(record.infeasible_evals[i])} {xs}\n"
            )


def load_record(path):
    """Read a record file; returns (RunRecord, SearchDomain, SofaConfig|None)."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.startswith(_RECORD_MAGIC):
            raise ValueError(f"{path} is not a run record file")
        header = json.loads(first[len(_RECORD_MAGIC):].strip())
        domain = SearchDomain.from_dict(header["domain"])
        config = SofaConfig.from_dict(header["sofa"]) if "sofa" in header else None
        rows = [line.split() for line in fh if line.strip()]
    k = len(rows)
    D = domain.dimension
    coords = np.tile(domain.centers, (k, 1))
    dims = np.zeros(k, dtype=np.int64)
    fitness = np.zeros(k, dtype=float)
    floored = np.zeros(k, dtype=bool)
    infeasible = np.zeros(k, dtype=np.int64)
    for i, row in enumerate(rows):
        fitness[i] = float(row[1])
        d = int(row[2])
        dims[i] = d
        floored[i] = bool(int(row[3]))
        infeasible[i] = int(row[4])
        coords[i, :d] = [float(v) for v in row[5:5 + d]]
    best_index = np.zeros(k, dtype=np.int64)
    best_fitness = np.empty(k, dtype=float)
    bi, bf = 0, fitness[0]
    for i in range(k):
        if fitness[i] > bf:
            bi, bf = i, fitness[i]
        best_index[i] = bi
        best_fitness[i] = bf
    record = RunRecord(
        coords=coords,
        dims=dims,
        fitness=fitness,
        floored=floored,
        infeasible_evals=infeasible,
        best_fitness=best_fitness,
        best_index=best_index,
        out_of_domain_count=int(header.get("out_of_domain_count", 0)),
        terminated_early=bool(header.get("terminated_early", False)),
        seed=int(header.get("seed", 0)),
    )
    return record, domain, config
