"""Kernel parameters and discrete function spaces.

Everything here is an immutable value object.  Grid functions live on a
uniform Cartesian grid over the box [-L, L]^N, cell centers at
x_i = -L + (i + 1/2) h, and are understood as extended by zero outside
the box.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BudgetError, GridMismatchError

DEFAULT_POINT_BUDGET = 2**16
BUDGET_ENV_VAR = "FRACEIG_BUDGET"


def point_budget() -> int:
    """Current cap on the total grid point count M (O(M^2) kernels)."""
    raw = os.environ.get(BUDGET_ENV_VAR)
    if raw is None:
        return DEFAULT_POINT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise BudgetError(f"{BUDGET_ENV_VAR} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise BudgetError(f"{BUDGET_ENV_VAR} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class KernelParams:
    """Dimension N, order s in (0,1), exponent p > 1, and derived constants."""

    dim_n: int
    order_s: float
    exponent_p: float

    def __post_init__(self):
        if int(self.dim_n) != self.dim_n or self.dim_n < 1:
            raise ValueError(f"dim_n must be a positive integer, got {self.dim_n}")
        if not (0.0 < self.order_s < 1.0):
            raise ValueError(f"order_s must lie in (0, 1), got {self.order_s}")
        if not self.exponent_p > 1.0:
            raise ValueError(f"exponent_p must exceed 1, got {self.exponent_p}")

    @property
    def sp_product(self) -> float:
        return self.order_s * self.exponent_p

    @property
    def regime(self) -> str:
        sp = self.sp_product
        if sp < self.dim_n:
            return "subcritical"
        if sp == self.dim_n:
            return "critical"
        return "supercritical"

    @property
    def critical_exponent(self) -> float | None:
        """Sobolev exponent pN/(N - sp); None (undefined) when sp >= N."""
        if self.sp_product >= self.dim_n:
            return None
        return self.exponent_p * self.dim_n / (self.dim_n - self.sp_product)

    @property
    def decay_exponent(self) -> float:
        """Sharp algebraic tail rate (N + sp)/(p - 1) of positive eigenfunctions."""
        return (self.dim_n + self.sp_product) / (self.exponent_p - 1.0)

    @property
    def kernel_power(self) -> float:
        """Exponent N + sp of the singular kernel |x - y|^-(N+sp)."""
        return self.dim_n + self.sp_product


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid over [-L, L]^dim with m cells per axis."""

    dim: int
    half_width: float
    points_per_axis: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        if not self.half_width > 0:
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        m = self.points_per_axis
        if int(m) != m or m < 1:
            raise ValueError(f"points_per_axis must be a positive integer, got {m}")
        budget = point_budget()
        if self.total_points > budget:
            raise BudgetError(
                f"grid has M = {self.total_points} points, budget is {budget} "
                f"(override with {BUDGET_ENV_VAR})"
            )

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def total_points(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def axis_centers(self) -> np.ndarray:
        h = self.spacing
        i = np.arange(self.points_per_axis, dtype=np.float64)
        return -self.half_width + (i + 0.5) * h

    def coords(self) -> np.ndarray:
        """Cell centers as an (M, dim) array in row-major index order."""
        return _grid_coords(self.dim, self.half_width, self.points_per_axis)

    def radii(self) -> np.ndarray:
        """Euclidean norm of every cell center, shape (M,)."""
        return np.sqrt(np.sum(self.coords() ** 2, axis=1))

    def boundary_distance(self) -> np.ndarray:
        """Distance from each cell center to the box boundary."""
        return self.half_width - np.max(np.abs(self.coords()), axis=1)


@lru_cache(maxsize=32)
def _grid_coords(dim: int, half_width: float, m: int) -> np.ndarray:
    axis = GridSpec(dim, half_width, m).axis_centers()
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    out = np.stack([g.reshape(-1) for g in grids], axis=1)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GridFunction:
    """Finitely supported function on a GridSpec, zero outside the box."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)
    extension: str = "zero outside box"

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.shape != (self.spec.total_points,):
            raise GridMismatchError(
                f"values must have shape ({self.spec.total_points},), "
                f"got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def with_values(self, values: np.ndarray) -> GridFunction:
        return GridFunction(self.spec, values)

    def __mul__(self, t: float) -> GridFunction:
        return GridFunction(self.spec, self.values * float(t))

    __rmul__ = __mul__

    def __add__(self, other: GridFunction) -> GridFunction:
        check_same_grid(self, other)
        return GridFunction(self.spec, self.values + other.values)

    def __sub__(self, other: GridFunction) -> GridFunction:
        check_same_grid(self, other)
        return GridFunction(self.spec, self.values - other.values)


def check_same_grid(u: GridFunction, v: GridFunction) -> None:
    if u.spec != v.spec:
        raise GridMismatchError(f"grid mismatch: {u.spec} vs {v.spec}")


def check_dims(u: GridFunction, k: KernelParams) -> None:
    if u.spec.dim != k.dim_n:
        raise GridMismatchError(
            f"grid dimension {u.spec.dim} does not match kernel dimension {k.dim_n}"
        )


def zeros(spec: GridSpec) -> GridFunction:
    return GridFunction(spec, np.zeros(spec.total_points))


def from_callable(spec: GridSpec, fn) -> GridFunction:
    """Sample a callable of the (M, dim) coordinate array onto the grid."""
    vals = np.asarray(fn(spec.coords()), dtype=np.float64).reshape(spec.total_points)
    return GridFunction(spec, vals)


def unit_sphere_area(dim: int) -> float:
    """Surface measure of S^{dim-1}; the 0-sphere counts two points."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)
