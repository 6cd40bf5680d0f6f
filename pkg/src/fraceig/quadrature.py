"""Singular-kernel quadrature building blocks.

Two ingredients used everywhere: the exterior tail integral of the kernel
over the box complement (approximated from the inscribed ball around each
cell, which over-counts by a monotone bias), and the angular reduction of
the kernel for radially symmetric functions.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate

from .params import GridSpec, KernelParams, unit_sphere_area

_tail_cache: dict = {}


def exterior_tail(distance: float, k: KernelParams) -> float:
    """Integral of |x - y|^(-(N+sp)) over {|y - x| > distance}.

    Adaptive radial-shell quadrature of the shell integrand
    area(S^{N-1}) r^{N-1} r^{-(N+sp)}; the closed form
    area * d^(-sp) / (sp) serves as the test oracle.
    """
    if distance <= 0:
        raise ValueError(f"tail distance must be positive, got {distance}")
    key = (distance, k.dim_n, k.sp_product)
    hit = _tail_cache.get(key)
    if hit is not None:
        return hit
    sp = k.sp_product
    val, _ = integrate.quad(lambda r: r ** (-1.0 - sp), distance, np.inf, limit=200)
    out = unit_sphere_area(k.dim_n) * val
    _tail_cache[key] = out
    return out


@lru_cache(maxsize=64)
def exterior_tail_vector(spec: GridSpec, k: KernelParams) -> np.ndarray:
    """T(x_i) for every cell center, from the inscribed-ball distance."""
    dists = spec.boundary_distance()
    out = np.empty(len(dists))
    for i, d in enumerate(dists):
        out[i] = exterior_tail(float(d), k)
    out.setflags(write=False)
    return out


def angular_kernel(r: float, rho: float, k: KernelParams) -> float:
    """J(r, rho) = integral over S^{N-1} of |r e1 - rho w|^(-(N+sp)) dw.

    Exact two-point sum in 1D; adaptive quadrature in the polar angle for
    N >= 2.  The caller's PV pairing is responsible for the r = rho spike.
    """
    if r <= 0 or rho <= 0:
        raise ValueError("angular kernel needs positive radii")
    if r == rho:
        raise ValueError("angular kernel is singular at r = rho")
    power = k.kernel_power
    if k.dim_n == 1:
        return abs(r - rho) ** (-power) + (r + rho) ** (-power)
    area_sub = unit_sphere_area(k.dim_n - 1)
    nm2 = k.dim_n - 2
    r2sum = r * r + rho * rho
    two_rrho = 2.0 * r * rho

    def integrand(theta):
        q = r2sum - two_rrho * math.cos(theta)
        if nm2 == 0:
            return q ** (-0.5 * power)
        return math.sin(theta) ** nm2 * q ** (-0.5 * power)

    val, _ = integrate.quad(integrand, 0.0, math.pi, limit=200, epsabs=1e-13, epsrel=1e-11)
    return area_sub * val


def clear_caches() -> None:
    _tail_cache.clear()
    exterior_tail_vector.cache_clear()
