"""Pure-numpy pair-sum kernels, used when the compiled core is unavailable.

Both backends implement the same block contract: a block partial depends
only on the block bounds and the inputs, never on the worker count, so
results are bit-reproducible for any parallel schedule.
"""

import numpy as np


def _phi_p(du: np.ndarray, p: float) -> np.ndarray:
    # |d|^(p-2) d with the removable singularity at d = 0 set to 0
    # (needed for p < 2, where |0|^(p-2) overflows).
    absd = np.abs(du)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = absd ** (p - 2.0) * du
    return np.where(du == 0.0, 0.0, out)


def form_block(u, phi, coords, p, neg_power, i_start, i_end):
    """Sum of phi_p(u_i - u_j) (phi_i - phi_j) |x_i - x_j|^(-neg_power)
    over pairs with i in [i_start, i_end) and j > i."""
    u = np.asarray(u)
    phi = np.asarray(phi)
    coords = np.asarray(coords)
    total = 0.0
    half = -0.5 * neg_power
    for i in range(i_start, i_end):
        du = u[i] - u[i + 1 :]
        dphi = phi[i] - phi[i + 1 :]
        diff = coords[i] - coords[i + 1 :]
        r2 = np.sum(diff * diff, axis=1)
        total += float(np.sum(_phi_p(du, p) * dphi * r2**half))
    return total


def operator_rows_block(u, coords, shape, p, neg_power, i_start, i_end, out):
    """Near-field row sums with reflection pairing around each row index.

    For row i, cell j and its reflection 2I - J (multi-indices) are summed
    together before accumulation when the reflection lies in the box; this
    realizes the principal value by symmetric cancellation.
    """
    u = np.asarray(u)
    coords = np.asarray(coords)
    shape = np.asarray(shape, dtype=np.int64)
    m_total = len(u)
    half = -0.5 * neg_power
    multi = np.stack(np.unravel_index(np.arange(m_total), shape), axis=1)
    j_idx = np.arange(m_total)
    for i in range(i_start, i_end):
        du = u[i] - u
        diff = coords[i] - coords
        r2 = np.sum(diff * diff, axis=1)
        r2[i] = 1.0
        term = _phi_p(du, p) * r2**half
        term[i] = 0.0
        refl_multi = 2 * multi[i] - multi
        valid = np.all((refl_multi >= 0) & (refl_multi < shape), axis=1)
        refl = np.ravel_multi_index(
            tuple(np.clip(refl_multi, 0, shape - 1).T), tuple(shape)
        )
        paired = np.where(
            valid & (refl > j_idx),
            term + term[refl],
            np.where(valid & (refl < j_idx), 0.0, term),
        )
        paired[i] = 0.0
        out[i - i_start] = float(np.sum(paired))
