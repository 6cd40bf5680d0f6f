# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled pair-sum kernels for the O(M^2) nonlocal sums.

Same block contract as the numpy fallback: block partials depend only on
the block bounds, so any worker schedule reproduces identical bits.
"""

from libc.math cimport fabs, pow


cdef inline double phi_p(double du, double p) nogil:
    # |d|^(p-2) d, with the removable singularity at d = 0 set to 0.
    if du == 0.0:
        return 0.0
    return pow(fabs(du), p - 2.0) * du


cdef inline double pair_term(double[::1] u, double[:, ::1] coords,
                             double p, double half,
                             Py_ssize_t i, Py_ssize_t j, Py_ssize_t dim) nogil:
    cdef double du = u[i] - u[j]
    if du == 0.0:
        return 0.0
    cdef double r2 = 0.0, dx
    cdef Py_ssize_t d
    for d in range(dim):
        dx = coords[i, d] - coords[j, d]
        r2 += dx * dx
    return phi_p(du, p) * pow(r2, half)


cdef inline Py_ssize_t reflect_flat(Py_ssize_t j, Py_ssize_t i,
                                    long[::1] shape, Py_ssize_t dim) nogil:
    """Flat index of the reflection 2*I - J, or -1 if outside the box."""
    cdef Py_ssize_t remi = i, remj = j, d
    cdef long comp
    cdef long[8] refl
    for d in range(dim - 1, -1, -1):
        comp = 2 * <long>(remi % shape[d]) - <long>(remj % shape[d])
        if comp < 0 or comp >= shape[d]:
            return -1
        refl[d] = comp
        remi //= shape[d]
        remj //= shape[d]
    cdef Py_ssize_t flat = 0
    for d in range(dim):
        flat = flat * shape[d] + refl[d]
    return flat


def form_block(double[::1] u, double[::1] phi, double[:, ::1] coords,
               double p, double neg_power, Py_ssize_t i_start, Py_ssize_t i_end):
    """Sum of phi_p(u_i - u_j) (phi_i - phi_j) |x_i - x_j|^(-neg_power)
    over pairs with i in [i_start, i_end) and j > i."""
    cdef Py_ssize_t m_total = u.shape[0]
    cdef Py_ssize_t dim = coords.shape[1]
    cdef double half = -0.5 * neg_power
    cdef double total = 0.0, row, du, dphi, r2, dx
    cdef Py_ssize_t i, j, d
    with nogil:
        for i in range(i_start, i_end):
            row = 0.0
            for j in range(i + 1, m_total):
                du = u[i] - u[j]
                if du == 0.0:
                    continue
                dphi = phi[i] - phi[j]
                r2 = 0.0
                for d in range(dim):
                    dx = coords[i, d] - coords[j, d]
                    r2 += dx * dx
                row += phi_p(du, p) * dphi * pow(r2, half)
            total += row
    return total


def operator_rows_block(double[::1] u, double[:, ::1] coords, long[::1] shape,
                        double p, double neg_power,
                        Py_ssize_t i_start, Py_ssize_t i_end, double[::1] out):
    """Near-field row sums with reflection pairing around each row index.

    Cell j and its reflection 2I - J are summed together before entering
    the accumulator whenever the reflection lies in the box; this realizes
    the principal value by symmetric cancellation.
    """
    cdef Py_ssize_t m_total = u.shape[0]
    cdef Py_ssize_t dim = coords.shape[1]
    cdef double half = -0.5 * neg_power
    cdef double acc
    cdef Py_ssize_t i, j, jp
    if dim > 8:
        raise ValueError("dimension exceeds kernel limit")
    with nogil:
        for i in range(i_start, i_end):
            acc = 0.0
            for j in range(m_total):
                if j == i:
                    continue
                jp = reflect_flat(j, i, shape, dim)
                if jp >= 0:
                    if jp > j:
                        acc += (pair_term(u, coords, p, half, i, j, dim)
                                + pair_term(u, coords, p, half, i, jp, dim))
                    # jp < j was handled as the partner of jp
                else:
                    acc += pair_term(u, coords, p, half, i, j, dim)
            out[i - i_start] = acc
