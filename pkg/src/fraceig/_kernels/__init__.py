"""Backend selection and deterministic parallel driving of the pair kernels.

The compiled Cython core is preferred; the numpy fallback is selected at
import when the extension is missing or FRACEIG_BACKEND=fallback.  Either
way the O(M^2) sums are split into fixed row blocks whose partials are
combined by a fixed-order pairwise tree, so results are bit-identical for
any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _fallback

BLOCK_ROWS = 64

_requested = os.environ.get("FRACEIG_BACKEND", "auto")
if _requested not in ("auto", "compiled", "fallback"):
    raise ImportError(f"FRACEIG_BACKEND must be auto|compiled|fallback, got {_requested!r}")

if _requested == "fallback":
    _impl = _fallback
    BACKEND = "fallback"
else:
    try:
        from . import _corecy as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = _fallback
        BACKEND = "fallback"


def available_backends() -> dict:
    """Importable backend modules keyed by name (for tests and benchmarks)."""
    out = {"fallback": _fallback}
    try:
        from . import _corecy

        out["compiled"] = _corecy
    except ImportError:
        pass
    return out


def default_workers() -> int:
    raw = os.environ.get("FRACEIG_WORKERS")
    if raw is None:
        return 1
    return max(1, int(raw))


def tree_sum(parts):
    """Fixed-order pairwise reduction; independent of how parts were produced."""
    parts = list(parts)
    if not parts:
        return 0.0
    while len(parts) > 1:
        nxt = [parts[k] + parts[k + 1] for k in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def _blocks(m_total: int):
    return [(lo, min(m_total, lo + BLOCK_ROWS)) for lo in range(0, m_total, BLOCK_ROWS)]


def pair_form_sum(u, phi, coords, p, neg_power, workers=None, impl=None):
    """Ordered double sum over distinct cell pairs of
    phi_p(u_i - u_j)(phi_i - phi_j) |x_i - x_j|^(-neg_power).

    Each unordered pair is evaluated once and doubled.
    """
    impl = impl or _impl
    workers = workers or default_workers()
    u = np.ascontiguousarray(u, dtype=np.float64)
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    blocks = _blocks(len(u))

    def run(block):
        return impl.form_block(u, phi, coords, p, neg_power, block[0], block[1])

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run, blocks))
    else:
        partials = [run(b) for b in blocks]
    return 2.0 * tree_sum(partials)


def operator_near_rows(u, coords, shape, p, neg_power, rows=None, workers=None, impl=None):
    """Reflection-paired near-field sums, one value per requested row.

    ``rows`` is a (start, end) range; default all rows.  The result omits
    the kernel prefactor 2 and the cell volume.
    """
    impl = impl or _impl
    workers = workers or default_workers()
    u = np.ascontiguousarray(u, dtype=np.float64)
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    shape = np.ascontiguousarray(shape, dtype=np.int64)
    lo, hi = rows if rows is not None else (0, len(u))
    out = np.empty(hi - lo, dtype=np.float64)
    blocks = [(a, b) for a, b in ((max(lo, s), min(hi, e)) for s, e in _blocks(len(u))) if a < b]

    def run(block):
        impl.operator_rows_block(
            u, coords, shape, p, neg_power, block[0], block[1], out[block[0] - lo : block[1] - lo]
        )

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, blocks))
    else:
        for b in blocks:
            run(b)
    return out
