"""Smooth compactly supported bump profiles used for initialization and
as explicit test candidates in the scaling studies."""

from __future__ import annotations

import numpy as np

from .params import GridFunction, GridSpec


def bump_profile(t: np.ndarray) -> np.ndarray:
    """(1 - t^2)^3 on |t| < 1, zero outside: C^2 across the support edge,
    value 1 at the center."""
    t = np.asarray(t, dtype=np.float64)
    inside = np.abs(t) < 1.0
    core = np.where(inside, 1.0 - t * t, 0.0)
    return core**3


def bump_values(coords: np.ndarray, center: np.ndarray, radius: float) -> np.ndarray:
    d = np.sqrt(np.sum((coords - center) ** 2, axis=1))
    return bump_profile(d / radius)


def centered_bump(spec: GridSpec, radius: float | None = None) -> GridFunction:
    radius = radius if radius is not None else spec.half_width / 2.0
    vals = bump_values(spec.coords(), np.zeros(spec.dim), radius)
    return GridFunction(spec, vals)
