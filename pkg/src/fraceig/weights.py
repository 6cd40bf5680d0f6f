"""Weight families for the eigenproblem coefficient g.

Each family is closed-form so that sup-norm bounds and the split
g = g_plus - g_minus stay exact.  All families except ``table`` are
radially symmetric; ``table`` is a sampled grid function, zero outside
its box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import ConfigError
from .params import GridFunction, unit_sphere_area

FAMILIES = ("gaussian_bump", "ring", "indicator_minus", "table")


def _smoothstep(t: np.ndarray) -> np.ndarray:
    # C^2 quintic step: 0 at t=0, 1 at t=1, with vanishing first and
    # second derivatives at both ends.
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


@dataclass(frozen=True)
class Weight:
    """Bounded weight g, possibly sign-changing, evaluable anywhere."""

    family: str
    a: float = 0.0
    b: float = 0.0
    r1: float = 0.0
    r2: float = math.inf
    table: GridFunction | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown weight family {self.family!r}")
        if self.family != "table":
            if self.a < 0 or self.b < 0:
                raise ConfigError("weight amplitudes a, b must be nonnegative")
        if self.family == "ring":
            if not (0 < self.r1 <= self.r2):
                raise ConfigError("ring weight needs 0 < r1 <= r2")
        if self.family == "indicator_minus" and not self.r1 > 0:
            raise ConfigError("indicator_minus needs r1 > 0")
        if self.family == "table" and self.table is None:
            raise ConfigError("table weight needs a grid function")

    # -- evaluation ---------------------------------------------------------

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Evaluate g at points of shape (n, dim) or (dim,)."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        r = np.sqrt(np.sum(pts * pts, axis=1))
        if self.family == "table":
            out = self._eval_table(pts)
        else:
            out = self._radial(r)
        if np.asarray(points).ndim == 1:
            return out[0]
        return out

    def _radial(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        if self.family == "gaussian_bump":
            return self.a * np.exp(-r * r) - self.b
        if self.family == "indicator_minus":
            return np.where(r < self.r1, self.a - self.b, -self.b)
        if self.family == "ring":
            if not math.isfinite(self.r2):
                # Degenerate ring: the transition never completes, g == a.
                return np.full_like(r, self.a)
            t = _smoothstep((r - self.r1) / (self.r2 - self.r1))
            return self.a + (-self.b - self.a) * t
        raise AssertionError(self.family)

    def _eval_table(self, pts: np.ndarray) -> np.ndarray:
        gf = self.table
        spec = gf.spec
        if pts.shape[1] != spec.dim:
            raise ConfigError(
                f"table weight is {spec.dim}-dimensional, points are {pts.shape[1]}-d"
            )
        h, L, m = spec.spacing, spec.half_width, spec.points_per_axis
        idx = np.floor((pts + L) / h).astype(np.int64)
        inside = np.all((idx >= 0) & (idx < m), axis=1)
        idx = np.clip(idx, 0, m - 1)
        flat = np.zeros(len(pts), dtype=np.int64)
        for d in range(spec.dim):
            flat = flat * m + idx[:, d]
        out = gf.values[flat]
        return np.where(inside, out, 0.0)

    # -- exact structure ----------------------------------------------------

    def sup_norm(self) -> float:
        """Exact L^inf bound."""
        if self.family == "gaussian_bump":
            return max(abs(self.a - self.b), self.b)
        if self.family == "indicator_minus":
            return max(abs(self.a - self.b), self.b)
        if self.family == "ring":
            if not math.isfinite(self.r2):
                return self.a
            return max(self.a, self.b)
        return float(np.max(np.abs(self.table.values), initial=0.0))

    def positive_part(self, points: np.ndarray) -> np.ndarray:
        return np.maximum(self(points), 0.0)

    def negative_part(self, points: np.ndarray) -> np.ndarray:
        return np.maximum(-self(points), 0.0)

    def positive_support_radius(self) -> float:
        """Radius outside which g <= 0 everywhere (inf if unbounded)."""
        if self.family == "gaussian_bump":
            if self.b <= 0:
                return math.inf
            if self.a <= self.b:
                return 0.0
            return math.sqrt(math.log(self.a / self.b))
        if self.family == "indicator_minus":
            if self.a > self.b:
                return self.r1
            return 0.0
        if self.family == "ring":
            if self.a <= 0:
                return 0.0
            if not math.isfinite(self.r2) or self.b <= 0:
                return math.inf
            # g crosses zero inside the smoothstep transition band.
            return self.r2
        r = self.table.spec.radii()
        pos = self.table.values > 0
        return float(np.max(r[pos], initial=0.0))

    def positive_mass(self, dim: int, radius: float = math.inf) -> float:
        """Integral of g_plus over the ball of the given radius.

        Semi-analytic for the radial families (1D adaptive quadrature in r),
        exact cell sum for table weights.
        """
        if self.family == "table":
            gf = self.table
            r = gf.spec.radii()
            gp = np.maximum(gf.values, 0.0)
            return float(np.sum(gp[r < radius]) * gf.spec.cell_volume)
        rmax = min(radius, self.positive_support_radius())
        if rmax <= 0:
            return 0.0
        area = unit_sphere_area(dim)

        def shell(r):
            return np.maximum(self._radial(np.asarray([r])), 0.0)[0] * r ** (dim - 1)

        if math.isinf(rmax):
            val, _ = integrate.quad(shell, 0.0, np.inf, limit=200)
        else:
            val, _ = integrate.quad(shell, 0.0, rmax, limit=200)
        return area * val


def gaussian_bump(a: float, b: float) -> Weight:
    return Weight("gaussian_bump", a=a, b=b)


def ring(a: float, b: float, r1: float, r2: float) -> Weight:
    return Weight("ring", a=a, b=b, r1=r1, r2=r2)


def indicator_minus(a: float, b: float, r1: float) -> Weight:
    return Weight("indicator_minus", a=a, b=b, r1=r1)


def table(grid_function: GridFunction) -> Weight:
    return Weight("table", table=grid_function)


def unit_weight() -> Weight:
    """g identically 1 (degenerate ring with the transition at infinity)."""
    return ring(1.0, 0.0, 1.0, math.inf)
