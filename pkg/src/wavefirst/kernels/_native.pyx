# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of kernels.pure: monotone accelerated projected gradient
for box-constrained quadratics over a symmetric CSR matrix.

The whole iteration runs in C loops with fixed work vectors; the matrices
involved are small enough that per-call overhead dominates the pure-numpy
version, which is why this kernel exists.
"""

from libc.math cimport sqrt, fabs

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "native"


cdef void _matvec(const double[::1] data, const int[::1] indices,
                  const int[::1] indptr, const double[::1] v,
                  double[::1] out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * v[indices[k]]
        out[i] = acc


cdef inline double _clipd(double v, double lo, double hi) noexcept nogil:
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


cdef double _pg_norm(const double[::1] x, const double[::1] ax,
                     const double[::1] b, double lo, double hi,
                     Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double d, acc = 0.0
    for i in range(n):
        d = x[i] - _clipd(x[i] - (ax[i] - b[i]), lo, hi)
        acc += d * d
    return sqrt(acc)


cdef double _quad(const double[::1] v, const double[::1] av,
                  const double[::1] b, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    cdef double q = 0.0
    for i in range(n):
        q += 0.5 * v[i] * av[i] - b[i] * v[i]
    return q


def bcls_minimize(a_csr, b, double lo, double hi, p0, double lipschitz,
                  long max_iter, double tol):
    """Returns ``(p, iterations, projected_gradient_norm, converged)``."""
    cdef cnp.ndarray[double, ndim=1] data = np.ascontiguousarray(a_csr.data, dtype=np.float64)
    cdef cnp.ndarray[int, ndim=1] indices = np.ascontiguousarray(a_csr.indices, dtype=np.int32)
    cdef cnp.ndarray[int, ndim=1] indptr = np.ascontiguousarray(a_csr.indptr, dtype=np.int32)
    cdef cnp.ndarray[double, ndim=1] bb = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = bb.shape[0]

    cdef cnp.ndarray[double, ndim=1] x = np.clip(np.asarray(p0, dtype=np.float64), lo, hi).copy()
    cdef cnp.ndarray[double, ndim=1] y = x.copy()
    cdef cnp.ndarray[double, ndim=1] z = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] gy = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] az = np.empty(n)

    cdef double[::1] dv = data
    cdef int[::1] iv = indices
    cdef int[::1] pv = indptr
    cdef double[::1] bv = bb
    cdef double[::1] xv = x
    cdef double[::1] yv = y
    cdef double[::1] zv = z
    cdef double[::1] gv = gy
    cdef double[::1] av = az

    cdef double big_l = lipschitz if lipschitz > 1e-300 else 1e-300
    cdef double t = 1.0, t_new, fx, qy, qz, pg, bound, gdot, ddot, d, xi
    cdef Py_ssize_t i
    cdef long k, iterations = 0
    cdef bint accepted

    _matvec(dv, iv, pv, xv, av, n)
    fx = _quad(xv, av, bv, n)
    pg = _pg_norm(xv, av, bv, lo, hi, n)
    if pg <= tol:
        return x, 0, pg, True

    for k in range(max_iter):
        iterations = k + 1
        _matvec(dv, iv, pv, yv, av, n)  # av = A y
        qy = _quad(yv, av, bv, n)
        for i in range(n):
            gv[i] = av[i] - bv[i]
        while True:
            gdot = 0.0
            ddot = 0.0
            for i in range(n):
                zv[i] = _clipd(yv[i] - gv[i] / big_l, lo, hi)
                d = zv[i] - yv[i]
                gdot += gv[i] * d
                ddot += d * d
            _matvec(dv, iv, pv, zv, av, n)  # av = A z
            qz = _quad(zv, av, bv, n)
            bound = qy + gdot + 0.5 * big_l * ddot
            if qz <= bound + 1e-15 * (fabs(qy) + 1.0) or big_l > 1e300:
                break
            big_l *= 2.0
        pg = _pg_norm(zv, av, bv, lo, hi, n)
        # ties within f-rounding noise count as accepts, otherwise the
        # iteration can stall once f-differences drop below roundoff
        accepted = qz <= fx + 1e-15 * (fabs(fx) + fabs(qz))
        if accepted and pg <= tol:
            for i in range(n):
                xv[i] = zv[i]
            fx = qz
            break
        t_new = 0.5 * (1.0 + sqrt(1.0 + 4.0 * t * t))
        if accepted:
            for i in range(n):
                xi = xv[i]
                yv[i] = zv[i] + ((t - 1.0) / t_new) * (zv[i] - xi)
                xv[i] = zv[i]
            fx = qz
        else:
            for i in range(n):
                yv[i] = xv[i] + (t / t_new) * (zv[i] - xv[i])
            t_new = 1.0  # restart momentum after a rejected step
        t = t_new

    _matvec(dv, iv, pv, xv, av, n)
    pg = _pg_norm(xv, av, bv, lo, hi, n)
    return x, iterations, pg, pg <= tol


def power_bound(a_csr, int iters=80):
    """Deterministic upper estimate of the largest eigenvalue of sym PSD A."""
    cdef cnp.ndarray[double, ndim=1] data = np.ascontiguousarray(a_csr.data, dtype=np.float64)
    cdef cnp.ndarray[int, ndim=1] indices = np.ascontiguousarray(a_csr.indices, dtype=np.int32)
    cdef cnp.ndarray[int, ndim=1] indptr = np.ascontiguousarray(a_csr.indptr, dtype=np.int32)
    cdef Py_ssize_t n = a_csr.shape[0]
    if n == 0:
        return 1.0
    cdef cnp.ndarray[double, ndim=1] v = np.ones(n) + np.arange(n) * (1e-3 / max(n, 1))
    v /= np.linalg.norm(v)
    cdef cnp.ndarray[double, ndim=1] w = np.empty(n)
    cdef double[::1] dv = data
    cdef int[::1] iv = indices
    cdef int[::1] pv = indptr
    cdef double[::1] vv = v
    cdef double[::1] wv = w
    cdef double lam = 0.0, nw
    cdef Py_ssize_t i
    cdef int it
    for it in range(iters):
        _matvec(dv, iv, pv, vv, wv, n)
        nw = 0.0
        lam = 0.0
        for i in range(n):
            nw += wv[i] * wv[i]
            lam += vv[i] * wv[i]
        nw = sqrt(nw)
        if nw == 0.0:
            return 1e-300
        for i in range(n):
            vv[i] = wv[i] / nw
    return max(lam, 1e-300) * 1.05
