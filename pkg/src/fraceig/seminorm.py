"""Quadrature of the Gagliardo energy, the nonlinear form, and weighted
L^p integrals for grid functions extended by zero.

Discretization: the double integral over (box u exterior)^2 splits into
the box-box midpoint double sum (diagonal cell pair skipped; its integrand
vanishes like |x-y|^{p(1-s)}), the two box-exterior strips (each equal to
sum_i |u_i|^p T(x_i) h^N with the exterior tail T), and the vanishing
exterior-exterior part.
"""

from __future__ import annotations

import numpy as np

from ._kernels import pair_form_sum
from .params import GridFunction, KernelParams, check_dims, check_same_grid
from .quadrature import exterior_tail_vector
from .weights import Weight


def phi_p(values: np.ndarray, p: float) -> np.ndarray:
    """|t|^(p-2) t elementwise, 0 at t = 0 (removable for every p > 1)."""
    values = np.asarray(values, dtype=np.float64)
    absd = np.abs(values)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = absd ** (p - 2.0) * values
    return np.where(values == 0.0, 0.0, out)


def nonlinear_form(u: GridFunction, phi: GridFunction, k: KernelParams,
                   workers: int | None = None) -> float:
    """Discretized double integral of
    phi_p(u(x) - u(y)) (phi(x) - phi(y)) |x - y|^(-(N+sp))."""
    check_same_grid(u, phi)
    check_dims(u, k)
    parts = form_parts(u, phi, k, workers)
    return parts[0] + parts[1]


def form_parts(u: GridFunction, phi: GridFunction, k: KernelParams,
               workers: int | None = None) -> tuple[float, float]:
    """(box-box, exterior-correction) parts of the nonlinear form."""
    check_same_grid(u, phi)
    check_dims(u, k)
    spec = u.spec
    vol = spec.cell_volume
    boxbox = pair_form_sum(
        u.values, phi.values, spec.coords(), k.exponent_p, k.kernel_power,
        workers=workers,
    ) * vol * vol
    tails = exterior_tail_vector(spec, k)
    exterior = 2.0 * float(np.sum(phi_p(u.values, k.exponent_p) * phi.values * tails)) * vol
    return boxbox, exterior


def gagliardo_seminorm_p(u: GridFunction, k: KernelParams,
                         workers: int | None = None) -> float:
    """p-th power of the Gagliardo seminorm of the zero-extended u.

    Computed as nonlinear_form(u, u): identical code path, so the
    definitional coincidence holds bit for bit.
    """
    return nonlinear_form(u, u, k, workers=workers)


def seminorm_parts(u: GridFunction, k: KernelParams,
                   workers: int | None = None) -> tuple[float, float]:
    """(box-box, exterior-correction) parts of the seminorm."""
    return form_parts(u, u, k, workers)


def weighted_lp_integral(u: GridFunction, g: Weight, k: KernelParams) -> float:
    """sum_i g(x_i) |u_i|^p h^N; may be negative for sign-changing g."""
    check_dims(u, k)
    spec = u.spec
    g_vals = g(spec.coords())
    return float(np.sum(g_vals * np.abs(u.values) ** k.exponent_p)) * spec.cell_volume
