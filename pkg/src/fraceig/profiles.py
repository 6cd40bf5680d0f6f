"""Radially symmetric profiles given by a node table plus a power tail.

A profile is cubic-spline interpolated between its nodes, constant below
the first node, and follows the explicit tail model c * r^(-alpha) beyond
the last node.  Profiles tagged positive/decreasing are validated against
those tags at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

TAIL_MATCH_TOL = 1e-12


@dataclass(frozen=True)
class RadialProfile:
    nodes: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    tail_coefficient: float | None = None
    tail_exponent: float | None = None
    positive: bool = True
    decreasing: bool = True
    end_derivatives: tuple | None = None

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=np.float64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if nodes.ndim != 1 or nodes.shape != values.shape or len(nodes) < 4:
            raise ValueError("profile needs matching 1-d node/value tables, >= 4 nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("profile radii must be strictly increasing")
        if nodes[0] < 0:
            raise ValueError("profile radii must be nonnegative")
        if self.positive and np.any(values < 0):
            raise ValueError("profile tagged positive has negative values")
        if self.decreasing and np.any(np.diff(values) > 0):
            raise ValueError("profile tagged decreasing has increasing values")
        if (self.tail_coefficient is None) != (self.tail_exponent is None):
            raise ValueError("tail needs both coefficient and exponent")
        if self.tail_coefficient is not None:
            r_k, v_k = nodes[-1], values[-1]
            tail_at_rk = self.tail_coefficient * r_k ** (-self.tail_exponent)
            if abs(tail_at_rk - v_k) > TAIL_MATCH_TOL * max(1.0, abs(v_k)):
                raise ValueError(
                    f"tail does not match the last node: {tail_at_rk} vs {v_k}"
                )
        nodes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if self.end_derivatives is not None:
            d0, dk = self.end_derivatives
            bc = ((1, float(d0)), (1, float(dk)))
        else:
            bc = "not-a-knot"
        object.__setattr__(self, "_spline", CubicSpline(nodes, values, bc_type=bc))

    @property
    def r_first(self) -> float:
        return float(self.nodes[0])

    @property
    def r_last(self) -> float:
        return float(self.nodes[-1])

    @property
    def has_tail(self) -> bool:
        return self.tail_coefficient is not None

    def __call__(self, r):
        r = np.asarray(r, dtype=np.float64)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        if np.any(r < 0):
            raise ValueError("profile radii must be nonnegative")
        if not self.has_tail and np.any(r > self.r_last):
            raise ValueError("profile has no tail model beyond its last node")
        out = np.empty_like(r)
        below = r < self.r_first
        beyond = r > self.r_last
        mid = ~(below | beyond)
        out[below] = self.values[0]
        out[mid] = self._spline(r[mid])
        if self.has_tail and np.any(beyond):
            out[beyond] = self.tail_coefficient * r[beyond] ** (-self.tail_exponent)
        return float(out[0]) if scalar else out

    def derivative(self, r: float, order: int = 1) -> float:
        """One-sided from the spline below r_last, analytic on the tail."""
        if r < self.r_first:
            return 0.0
        if r <= self.r_last:
            return float(self._spline(r, nu=order))
        a, c = self.tail_exponent, self.tail_coefficient
        if order == 1:
            return -a * c * r ** (-a - 1.0)
        if order == 2:
            return a * (a + 1.0) * c * r ** (-a - 2.0)
        raise ValueError("only first and second derivatives are supported")

    def dilate(self, scale: float) -> RadialProfile:
        """Profile r -> self(scale * r)."""
        if scale <= 0:
            raise ValueError("dilation scale must be positive")
        tail_c = None
        if self.has_tail:
            tail_c = self.tail_coefficient * scale ** (-self.tail_exponent)
        return RadialProfile(
            nodes=self.nodes / scale,
            values=self.values,
            tail_coefficient=tail_c,
            tail_exponent=self.tail_exponent,
            positive=self.positive,
            decreasing=self.decreasing,
            end_derivatives=None
            if self.end_derivatives is None
            else (self.end_derivatives[0] * scale, self.end_derivatives[1] * scale),
        )

    def scale_values(self, t: float) -> RadialProfile:
        """Profile r -> t * self(r), t > 0."""
        if t <= 0:
            raise ValueError("amplitude scale must be positive")
        return RadialProfile(
            nodes=self.nodes,
            values=self.values * t,
            tail_coefficient=None if not self.has_tail else self.tail_coefficient * t,
            tail_exponent=self.tail_exponent,
            positive=self.positive,
            decreasing=self.decreasing,
            end_derivatives=None
            if self.end_derivatives is None
            else (self.end_derivatives[0] * t, self.end_derivatives[1] * t),
        )
