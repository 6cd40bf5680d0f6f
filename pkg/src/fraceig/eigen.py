"""Variational computation of principal eigenvalues.

The positive branch minimizes the Gagliardo energy over the constraint
set {integral of g |u|^p = 1}; the negative branch mirrors it on
{integral = -1}.  Descent is projected gradient with Armijo backtracking
on the quotient itself, rescaling back to the constraint set after every
step.  The solver tracks the branch objective (energy over |constraint|),
which is positive and nonincreasing on both branches, and reports the
signed eigenvalue at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from .bumps import bump_values
from .errors import AdmissibilityError, ConstraintError, SolverError
from .operator import frac_p_laplacian_rows
from .params import GridFunction, GridSpec, KernelParams, check_dims
from .seminorm import gagliardo_seminorm_p, nonlinear_form, phi_p, weighted_lp_integral
from .weights import Weight

_TINY = 1e-300


@dataclass(frozen=True)
class SolverOptions:
    max_iterations: int = 2000
    tolerance: float = 1e-12
    initial_step: float = 1.0
    shrink_factor: float = 0.5
    sufficient_decrease: float = 1e-4
    max_backtracks: int = 60
    seed: int = 0
    init: str = "random_positive"
    provided: GridFunction | None = None

    def __post_init__(self):
        if self.tolerance <= 0 or self.initial_step <= 0:
            raise ValueError("tolerances and steps must be positive")
        if not 0.0 < self.shrink_factor < 1.0:
            raise ValueError("shrink factor must lie in (0, 1)")
        if not 0.0 < self.sufficient_decrease < 1.0:
            raise ValueError("sufficient-decrease constant must lie in (0, 1)")
        if self.init not in ("random_positive", "bump", "provided"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.init == "provided" and self.provided is None:
            raise ValueError("init='provided' needs a grid function")


@dataclass(frozen=True)
class EigenPair:
    eigenvalue: float
    eigenfunction: GridFunction
    constraint_value: float
    residual: float
    iterations: int
    converged: bool
    trace: tuple = field(repr=False, default=())


def rayleigh_quotient(u: GridFunction, g: Weight, k: KernelParams,
                      branch: str = "positive", workers: int | None = None) -> float:
    """Energy over weighted constraint; sign of the constraint must match
    the requested branch."""
    den = weighted_lp_integral(u, g, k)
    _check_branch(den, branch)
    return gagliardo_seminorm_p(u, k, workers=workers) / den


def rayleigh_gradient(u: GridFunction, g: Weight, k: KernelParams,
                      workers: int | None = None) -> GridFunction:
    """Grid gradient of the signed Rayleigh quotient,
    (p h^N / den) [A(u) - RQ(u) g phi_p(u)] with A the strong evaluation."""
    den = weighted_lp_integral(u, g, k)
    if den == 0.0:
        raise ConstraintError("degenerate constraint: integral of g |u|^p is zero")
    a_values, _, _ = frac_p_laplacian_rows(u, k, workers=workers)
    quotient = gagliardo_seminorm_p(u, k, workers=workers) / den
    g_vals = g(u.spec.coords())
    grad = (k.exponent_p * u.spec.cell_volume / den) * (
        a_values - quotient * g_vals * phi_p(u.values, k.exponent_p)
    )
    return GridFunction(u.spec, grad)


def minimize_rayleigh(g: Weight, k: KernelParams, spec: GridSpec,
                      opts: SolverOptions | None = None, branch: str = "positive",
                      support_mask: np.ndarray | None = None,
                      workers: int | None = None) -> EigenPair:
    """Principal eigenvalue by projected gradient descent on the quotient.

    ``support_mask`` restricts to grid functions vanishing outside the mask
    (hard projection each iteration); used by the Dirichlet solver.
    """
    opts = opts or SolverOptions()
    sign = _branch_sign(branch)
    p = k.exponent_p
    vol = spec.cell_volume
    coords = spec.coords()
    g_vals = g(coords)
    if support_mask is None:
        support_mask = np.ones(spec.total_points, dtype=bool)

    u = _initial_values(g_vals, spec, opts, sign, support_mask)
    u = _project(u, g_vals, p, vol, sign)
    energy = _energy(spec, u, k, workers)
    trace = [(0, energy)]

    step = opts.initial_step
    accepted = 0
    converged = False
    for it in range(1, opts.max_iterations + 1):
        grad = _branch_gradient(spec, u, k, g_vals, energy, sign, workers)
        grad_norm2 = float(np.sum(grad * grad)) * vol
        if grad_norm2 == 0.0:
            converged = True
            break
        step = min(opts.initial_step, 2.0 * step)
        candidate = None
        for _ in range(opts.max_backtracks):
            trial = (u - step * grad) * support_mask
            den = float(np.sum(g_vals * np.abs(trial) ** p)) * vol
            if sign * den > 0.0:
                trial = _project(trial, g_vals, p, vol, sign)
                trial_energy = _energy(spec, trial, k, workers)
                if trial_energy <= energy - opts.sufficient_decrease * step * grad_norm2:
                    candidate = (trial, trial_energy)
                    break
            step *= opts.shrink_factor
        if candidate is None:
            # Backtracking exhausted: numerical stationarity of the quotient.
            converged = True
            break
        new_u, new_energy = candidate
        if new_energy > energy:
            raise SolverError("step rule failure: accepted step increased the quotient")
        decrease = (energy - new_energy) / max(abs(energy), _TINY)
        u, energy = new_u, new_energy
        accepted = it
        trace.append((it, energy))
        if decrease < opts.tolerance:
            converged = True
            break

    # Minimizers are of constant sign; |u| then renormalize is a no-op at a
    # true minimizer and safe everywhere else.
    u = _project(np.abs(u) * support_mask, g_vals, p, vol, sign)
    eigenfunction = GridFunction(spec, u)
    constraint = weighted_lp_integral(eigenfunction, g, k)
    eigenvalue = gagliardo_seminorm_p(eigenfunction, k, workers=workers) / constraint
    residual = eigen_residual(eigenfunction, eigenvalue, g, k,
                              support_mask=support_mask, seed=opts.seed, workers=workers)
    return EigenPair(
        eigenvalue=eigenvalue,
        eigenfunction=eigenfunction,
        constraint_value=constraint,
        residual=residual,
        iterations=accepted,
        converged=converged,
        trace=tuple(trace),
    )


def dirichlet_mu1(radius: float, g: Weight, k: KernelParams, spec: GridSpec,
                  opts: SolverOptions | None = None,
                  workers: int | None = None) -> EigenPair:
    """First Dirichlet eigenvalue on the ball B_R (zero outside)."""
    if radius <= 0:
        raise ValueError("ball radius must be positive")
    if spec.half_width < 2.0 * radius:
        raise ValueError(
            f"box half-width {spec.half_width} leaves margin "
            f"{spec.half_width - radius} < R = {radius} around B_R"
        )
    check_dims_spec(spec, k)
    mask = spec.radii() < radius
    g_vals = g(spec.coords())
    if not np.any(mask & (g_vals > 0.0)):
        raise AdmissibilityError("weight has no positive cell inside B_R")
    return minimize_rayleigh(g, k, spec, opts=opts, branch="positive",
                             support_mask=mask, workers=workers)


def picone_defect(u: GridFunction, v: GridFunction, k: KernelParams,
                  m_shift: float | None = None, workers: int | None = None) -> float:
    """Gagliardo energy of v minus the nonlinear form of u against
    v^p / (u + m)^(p-1); nonnegative up to quadrature error."""
    check_dims(u, k)
    if np.any(v.values < 0):
        raise ValueError("picone defect needs nonnegative v")
    if np.any(u.values < 0):
        raise ValueError("picone defect needs nonnegative u")
    if m_shift is None:
        m_shift = 1e-6 * float(np.max(u.values))
    if m_shift <= 0:
        raise ValueError("m_shift must be positive")
    p = k.exponent_p
    w = GridFunction(u.spec, v.values**p / (u.values + m_shift) ** (p - 1.0))
    energy_v = gagliardo_seminorm_p(v, k, workers=workers)
    return energy_v - nonlinear_form(u, w, k, workers=workers)


def eigen_residual(u: GridFunction, eigenvalue: float, g: Weight, k: KernelParams,
                   support_mask: np.ndarray | None = None, seed: int = 0,
                   workers: int | None = None) -> float:
    """Max over a probe set of |weak form - lambda * weighted pairing|."""
    spec = u.spec
    vol = spec.cell_volume
    g_vals = g(spec.coords())
    rhs_density = g_vals * phi_p(u.values, k.exponent_p)
    worst = 0.0
    for probe in _probe_set(spec, support_mask, seed):
        lhs = nonlinear_form(u, probe, k, workers=workers)
        rhs = eigenvalue * float(np.sum(rhs_density * probe.values)) * vol
        worst = max(worst, abs(lhs - rhs))
    return worst


def check_dims_spec(spec: GridSpec, k: KernelParams) -> None:
    if spec.dim != k.dim_n:
        raise ValueError(f"grid dimension {spec.dim} != kernel dimension {k.dim_n}")


# -- internals ---------------------------------------------------------------


def _branch_sign(branch: str) -> float:
    if branch == "positive":
        return 1.0
    if branch == "negative":
        return -1.0
    raise ValueError(f"branch must be positive or negative, got {branch!r}")


def _check_branch(den: float, branch: str) -> None:
    sign = _branch_sign(branch)
    if den == 0.0:
        raise ConstraintError("degenerate constraint: integral of g |u|^p is zero")
    if sign * den < 0.0:
        raise ConstraintError(
            f"constraint integral {den} has the wrong sign for the {branch} branch"
        )


def _project(values: np.ndarray, g_vals: np.ndarray, p: float, vol: float,
             sign: float) -> np.ndarray:
    den = float(np.sum(g_vals * np.abs(values) ** p)) * vol
    if sign * den <= 0.0:
        raise ConstraintError(
            "iterate left the constraint branch (integral of g |u|^p "
            f"= {den}, expected sign {sign:+.0f})"
        )
    return values * abs(den) ** (-1.0 / p)


def _energy(spec: GridSpec, values: np.ndarray, k: KernelParams, workers) -> float:
    return gagliardo_seminorm_p(GridFunction(spec, values), k, workers=workers)


def _branch_gradient(spec, values, k, g_vals, energy, sign, workers):
    # On the constraint set |den| = 1 the branch objective is
    # energy / |den|; its gradient is sign * grad of the signed quotient.
    u = GridFunction(spec, values)
    a_values, _, _ = frac_p_laplacian_rows(u, k, workers=workers)
    den = sign  # |den| = 1 after projection
    quotient = sign * energy
    p = k.exponent_p
    return (p * spec.cell_volume / abs(den)) * (
        a_values - quotient * g_vals * phi_p(values, p)
    ) * sign


def _initial_values(g_vals, spec, opts, sign, mask, p) -> np.ndarray:
    coords = spec.coords()

    candidates = []
    if opts.init == "provided":
        candidates.append(opts.provided.values * mask)
    else:
        rng = np.random.default_rng(opts.seed)
        base = bump_values(coords, np.zeros(spec.dim), spec.half_width / 2.0)
        if opts.init == "random_positive":
            base = base * (0.5 + rng.random(spec.total_points))
        candidates.append(base * mask)
        # fallback bump centered where the branch weight is most favorable
        favorable = np.where(mask, sign * g_vals, -np.inf)
        center_idx = int(np.argmax(favorable))
        center = coords[center_idx]
        margin = spec.half_width - float(np.max(np.abs(center)))
        radius = max(min(spec.half_width / 4.0, margin), 2.0 * spec.spacing)
        relocated = bump_values(coords, center, radius)
        if opts.init == "random_positive":
            relocated = relocated * (0.5 + rng.random(spec.total_points))
        candidates.append(relocated * mask)

    for vals in candidates:
        den = float(np.sum(g_vals * np.abs(vals) ** p))
        if sign * den > 0.0:
            return vals
    raise ConstraintError(
        "empty constraint set: no grid bump with the requested constraint sign"
    )


def _probe_set(spec: GridSpec, mask, seed: int):
    coords = spec.coords()
    L = spec.half_width
    if mask is None:
        mask = np.ones(spec.total_points, dtype=bool)
    probes = []
    centers = [np.zeros(spec.dim)]
    for s in (+0.5, -0.5):
        c = np.zeros(spec.dim)
        c[0] = s * L
        centers.append(c)
    for c in centers:
        d2 = np.sum((coords - c) ** 2, axis=1)
        probes.append(np.exp(-d2 / (L / 4.0) ** 2))
    rng = np.random.default_rng(seed + 1)
    m = spec.points_per_axis
    for _ in range(2):
        noise = rng.standard_normal(spec.total_points).reshape([m] * spec.dim)
        smooth = ndimage.uniform_filter(noise, size=max(3, m // 16), mode="constant")
        probes.append(smooth.reshape(-1))
    return [GridFunction(spec, v * mask) for v in probes]
