"""Rectangular search domains (finite projections of a Hilbert-cube-like box)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SearchDomain:
    """Axis-aligned box: coordinate j spans [centers[j] - widths[j]/2, centers[j] + widths[j]/2].

    ``diagonal`` is R = sqrt(sum widths^2), the l2 bound on the distance
    between any two points of the box.  Instances are immutable and safe to
    share across concurrent runs.
    """

    centers: np.ndarray
    widths: np.ndarray
    diagonal: float
    lower: np.ndarray = field(init=False)
    upper: np.ndarray = field(init=False)

    def __post_init__(self):
        lower = self.centers - self.widths / 2.0
        upper = self.centers + self.widths / 2.0
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dimension(self) -> int:
        return int(self.centers.size)

    def to_dict(self) -> dict:
        return {"centers": self.centers.tolist(), "widths": self.widths.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "SearchDomain":
        return make_domain(data["centers"], data["widths"])


def make_domain(centers, widths) -> SearchDomain:
    """Build a SearchDomain, validating shapes and strict width positivity."""
    c = np.asarray(centers, dtype=float).ravel()
    w = np.asarray(widths, dtype=float).ravel()
    if c.size != w.size:
        raise ValueError(f"centers and widths length mismatch: {c.size} vs {w.size}")
    if c.size < 1:
        raise ValueError("domain needs at least one coordinate")
    if not np.all(np.isfinite(c)) or not np.all(np.isfinite(w)):
        raise ValueError("centers and widths must be finite")
    if np.any(w <= 0.0):
        raise ValueError("all widths must be strictly positive")
    c = c.copy()
    w = w.copy()
    c.flags.writeable = False
    w.flags.writeable = False
    return SearchDomain(centers=c, widths=w, diagonal=float(np.sqrt(np.sum(w * w))))


def projection(domain: SearchDomain, d: int) -> SearchDomain:
    """First-d-coordinates sub-domain.

    The result's diagonal is recomputed from its own widths; kernel scaling
    deliberately keeps using the parent's diagonal (see sampler/core).
    """
    if not 1 <= d <= domain.dimension:
        raise ValueError(f"projection dimension {d} out of range 1..{domain.dimension}")
    return make_domain(domain.centers[:d], domain.widths[:d])


def contains(domain: SearchDomain, point) -> bool:
    """Closed-boundary membership test for a point of length <= dimension.

    Uses the precomputed per-coordinate bounds, so points produced by
    sampling (which clips to those same bounds) always pass; the rounded
    |x - a| <= c/2 form can disagree by one ulp at the boundary.
    """
    p = np.asarray(point, dtype=float).ravel()
    if p.size > domain.dimension:
        raise ValueError(f"point length {p.size} exceeds domain dimension {domain.dimension}")
    d = p.size
    return bool(np.all(p >= domain.lower[:d]) and np.all(p <= domain.upper[:d]))
