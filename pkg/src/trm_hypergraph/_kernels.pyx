# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled population-dynamics kernels; same contract as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

# shares below this are set to zero so triple products never go subnormal
cdef double FLOOR = 1e-100


cdef void _payoffs(const cnp.int64_t[::1] a, const cnp.int64_t[::1] b,
                   const cnp.int64_t[::1] c, const double[::1] val,
                   const double[::1] q, double[::1] u) noexcept nogil:
    cdef Py_ssize_t k, n = u.shape[0], m = val.shape[0]
    cdef cnp.int64_t x, y, z
    cdef double p
    for k in range(n):
        u[k] = 0.0
    for k in range(m):
        x = a[k]
        y = b[k]
        z = c[k]
        p = val[k]
        if x < y:
            if y < z:
                u[x] += 2.0 * p * q[y] * q[z]
                u[y] += 2.0 * p * q[x] * q[z]
                u[z] += 2.0 * p * q[x] * q[y]
            else:
                u[y] += 2.0 * p * q[x] * q[y]
                u[x] += p * q[y] * q[y]
        elif y < z:
            u[x] += 2.0 * p * q[x] * q[z]
            u[z] += p * q[x] * q[x]
        else:
            u[x] += p * q[x] * q[x]


def expected_payoffs(cnp.int64_t[::1] a, cnp.int64_t[::1] b, cnp.int64_t[::1] c,
                     double[::1] val, q):
    cdef double[::1] qv = np.ascontiguousarray(q, dtype=np.float64)
    out = np.empty(qv.shape[0])
    cdef double[::1] u = out
    with nogil:
        _payoffs(a, b, c, val, qv, u)
    return out


def run(cnp.int64_t[::1] a, cnp.int64_t[::1] b, cnp.int64_t[::1] c,
        double[::1] val, q0, int max_iter, double eps):
    cdef Py_ssize_t k, n
    cdef int it = 0, status = 0, converged = 0
    cdef double total, s, delta, v
    q_arr = np.array(q0, dtype=np.float64)
    n = q_arr.shape[0]
    u_arr = np.empty(n)
    new_arr = np.empty(n)
    cdef double[::1] q = q_arr
    cdef double[::1] u = u_arr
    cdef double[::1] new = new_arr
    with nogil:
        while it < max_iter:
            _payoffs(a, b, c, val, q, u)
            total = 0.0
            for k in range(n):
                total += q[k] * u[k]
            if not total > 0.0:
                status = 1
                break
            it += 1
            s = 0.0
            for k in range(n):
                new[k] = q[k] * u[k] / total
                s += new[k]
            delta = 0.0
            for k in range(n):
                v = new[k] / s
                if v < FLOOR:
                    v = 0.0
                if fabs(v - q[k]) > delta:
                    delta = fabs(v - q[k])
                q[k] = v
            if delta < eps:
                converged = 1
                break
    return q_arr, it, bool(converged), status
