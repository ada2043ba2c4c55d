"""Per-coordinate proposal kernels and the mutation-size schedule.

Two kernel families drive the optimizer's mutation step:

* a truncated Gaussian whose width sigma_k = R / sqrt(ln(k+1)) reproduces the
  iteration-indexed density proportional to (k+1)^(-r^2 / 2R^2), and
* a truncated Cauchy-type kernel with density proportional to
  1 / (eps + (x - center)^2), whose scale sqrt(eps) follows the schedule
  eps(k) = k^(-(a + b k)).

Both are sampled by exact inverse-CDF transforms, so every draw lands inside
the requested interval by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

BASIC_GAUSSIAN = "basic_gaussian"
SIMPLIFIED_CAUCHY = "simplified_cauchy"

# Localization is already a point mass long before eps reaches this floor;
# clamping keeps the tan/arctan inversion finite.
EPSILON_FLOOR = 1e-300


@dataclass(frozen=True)
class KernelConfig:
    """Kernel variant plus the Cauchy schedule parameters (a > 0, b >= 0)."""

    variant: str = SIMPLIFIED_CAUCHY
    epsilon_a: float = 0.7
    epsilon_b: float = 2.5e-6

    def __post_init__(self):
        if self.variant not in (BASIC_GAUSSIAN, SIMPLIFIED_CAUCHY):
            raise ValueError(f"unknown kernel variant: {self.variant!r}")
        if not self.epsilon_a > 0.0:
            raise ValueError("schedule parameter a must be positive")
        if self.epsilon_b < 0.0:
            raise ValueError("schedule parameter b must be non-negative")

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "epsilon_a": self.epsilon_a,
            "epsilon_b": self.epsilon_b,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KernelConfig":
        return cls(**data)


def gaussian_sigma(k: int, diagonal: float) -> float:
    """Gaussian kernel width at iteration k for a domain with diagonal R.

    Defined by (k+1)^(-r^2 / 2R^2) = exp(-r^2 / 2 sigma^2), which gives
    sigma = R / sqrt(ln(k+1)).
    """
    if k < 1:
        raise ValueError(f"iteration index must be >= 1, got {k}")
    if not diagonal > 0.0:
        raise ValueError("diagonal must be positive")
    return diagonal / math.sqrt(math.log(k + 1.0))


def epsilon_schedule(k: int, a: float, b: float) -> float:
    """Squared kernel scale eps(k) = k^(-(a + b k)), clamped at EPSILON_FLOOR."""
    if k < 1:
        raise ValueError(f"iteration index must be >= 1, got {k}")
    value = math.exp(-(a + b * float(k)) * math.log(float(k)))
    return max(value, EPSILON_FLOOR)


def _reflected_window(mean, sigma, lo, hi):
    """Standardized bounds, reflected into the lower tail for CDF precision."""
    a = (lo - mean) / sigma
    b = (hi - mean) / sigma
    flip = a > 0.0
    a2 = np.where(flip, -b, a)
    b2 = np.where(flip, -a, b)
    return a2, b2, flip


def _tg_ppf_aligned(u, mean, sigma, lo, hi):
    """Truncated-Gaussian inverse CDF on pre-broadcast float arrays."""
    a2, b2, flip = _reflected_window(mean, sigma, lo, hi)
    u2 = np.where(flip, 1.0 - u, u)
    pa = ndtr(a2)
    pb = ndtr(b2)
    window = pb - pa
    with np.errstate(divide="ignore", invalid="ignore"):
        z2 = ndtri(pa + u2 * window)
    # Window lost to underflow: all mass sits at the endpoint nearest the mean
    # (b2 in reflected coordinates).  ndtri(0)/ndtri(1) give the correct +-inf
    # endpoints otherwise; the final clip maps them onto lo/hi.
    z2 = np.where(window > 0.0, z2, b2)
    z = np.where(flip, -z2, z2)
    return np.clip(mean + sigma * z, lo, hi)


def truncated_gaussian_ppf(u, mean, sigma, lo, hi):
    """Inverse CDF of the Gaussian restricted to [lo, hi]."""
    u, mean, sigma, lo, hi = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (u, mean, sigma, lo, hi))
    )
    return _tg_ppf_aligned(u, mean, sigma, lo, hi)


def truncated_gaussian_cdf(x, mean, sigma, lo, hi):
    """CDF of the Gaussian restricted to [lo, hi]."""
    x, mean, sigma, lo, hi = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (x, mean, sigma, lo, hi))
    )
    a2, b2, flip = _reflected_window(mean, sigma, lo, hi)
    pa = ndtr(a2)
    pb = ndtr(b2)
    z = (x - mean) / sigma
    z2 = np.where(flip, -z, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = (ndtr(z2) - pa) / (pb - pa)
    q = np.where(flip, 1.0 - q, q)
    q = np.where(x <= lo, 0.0, q)
    q = np.where(x >= hi, 1.0, q)
    return np.clip(q, 0.0, 1.0)


def truncated_gaussian_pdf(x, mean, sigma, lo, hi):
    """Density of the Gaussian restricted to [lo, hi] (zero outside)."""
    x, mean, sigma, lo, hi = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (x, mean, sigma, lo, hi))
    )
    a2, b2, _ = _reflected_window(mean, sigma, lo, hi)
    norm = ndtr(b2) - ndtr(a2)
    z = (x - mean) / sigma
    phi = np.exp(-0.5 * z * z) / (sigma * np.sqrt(2.0 * np.pi))
    inside = (x >= lo) & (x <= hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        dens = np.where(inside, phi / norm, 0.0)
    return dens


def sample_truncated_gaussian(mean, sigma, lo, hi, rng, size=None):
    """Draw from the Gaussian restricted to [lo, hi] via inverse CDF.

    The mean may lie outside [lo, hi]; precision is kept by reflecting
    one-sided windows into the lower tail before inverting.
    """
    if np.any(np.asarray(sigma, dtype=float) <= 0.0):
        raise ValueError("sigma must be positive")
    if np.any(np.asarray(lo, dtype=float) >= np.asarray(hi, dtype=float)):
        raise ValueError("need lo < hi")
    if size is None:
        size = np.broadcast_shapes(
            np.shape(mean), np.shape(sigma), np.shape(lo), np.shape(hi)
        )
    u = rng.random(size)
    x = truncated_gaussian_ppf(u, mean, sigma, lo, hi)
    return x if x.shape else float(x)


def truncated_cauchy_ppf(u, center, eps, lo, hi):
    """Inverse CDF of the Cauchy-type kernel 1/(eps + (x-center)^2) on [lo, hi]."""
    u, center, eps, lo, hi = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (u, center, eps, lo, hi))
    )
    s = np.sqrt(np.maximum(eps, EPSILON_FLOOR))
    theta_lo = np.arctan((lo - center) / s)
    theta_hi = np.arctan((hi - center) / s)
    x = center + s * np.tan(theta_lo + u * (theta_hi - theta_lo))
    return np.clip(x, lo, hi)


def truncated_cauchy_cdf(x, center, eps, lo, hi):
    """CDF of the Cauchy-type kernel on [lo, hi] (normalized arctan form)."""
    x, center, eps, lo, hi = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (x, center, eps, lo, hi))
    )
    s = np.sqrt(np.maximum(eps, EPSILON_FLOOR))
    theta_lo = np.arctan((lo - center) / s)
    theta_hi = np.arctan((hi - center) / s)
    q = (np.arctan((x - center) / s) - theta_lo) / (theta_hi - theta_lo)
    q = np.where(x <= lo, 0.0, q)
    q = np.where(x >= hi, 1.0, q)
    return np.clip(q, 0.0, 1.0)


def truncated_cauchy_pdf(x, center, eps, lo, hi):
    """Density of the Cauchy-type kernel on [lo, hi] (zero outside)."""
    x, center, eps, lo, hi = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (x, center, eps, lo, hi))
    )
    eps = np.maximum(eps, EPSILON_FLOOR)
    s = np.sqrt(eps)
    span = np.arctan((hi - center) / s) - np.arctan((lo - center) / s)
    amplitude = s / span
    inside = (x >= lo) & (x <= hi)
    return np.where(inside, amplitude / (eps + (x - center) ** 2), 0.0)


def sample_truncated_cauchy(center, eps, lo, hi, u):
    """Exact inverse-CDF draw from the Cauchy-type kernel on [lo, hi].

    ``u`` is a uniform variate (or array of variates) in [0, 1]; callers own
    the RNG stream.  u=0 maps to lo, u=1 to hi, and the result always lies in
    [lo, hi].
    """
    if np.any(np.asarray(eps, dtype=float) <= 0.0):
        raise ValueError("eps must be positive")
    if np.any(np.asarray(lo, dtype=float) >= np.asarray(hi, dtype=float)):
        raise ValueError("need lo < hi")
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr < 0.0) or np.any(u_arr > 1.0):
        raise ValueError("u must lie in [0, 1]")
    x = truncated_cauchy_ppf(u, center, eps, lo, hi)
    return x if x.shape else float(x)
