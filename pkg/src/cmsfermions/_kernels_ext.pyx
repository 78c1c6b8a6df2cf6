# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled log-kernel evaluation.

Mirrors ``cmsfermions._kernels_py.log_kernel_batch``; the two are kept
interchangeable and compared by the test suite.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, log, sin, expm1, log1p, exp

cnp.import_array()

cdef double LOG2 = 0.6931471805599453


cdef inline double _F(int kind, double lam, double rate, double x) nogil:
    cdef double t
    if kind == 1:
        return lam * log(fabs(sin(rate * x)))
    elif kind == 2:
        return lam * log(fabs(x))
    elif kind == 3:
        t = fabs(rate * x)
        return lam * (t + log(-expm1(-2.0 * t)) - LOG2)
    elif kind == 4:
        t = fabs(rate * x)
        return lam * (t + log1p(exp(-2.0 * t)) - LOG2)
    return rate * fabs(x)


def log_kernel_batch(int kind, double lam, double rate,
                     const double[:, ::1] X, const double[:, :, ::1] XP):
    """Real part of the log creation/annihilation kernel.

    ``X`` has shape ``(P, A)`` and ``XP`` shape ``(P, M, B)``; the result
    ``out[p, m]`` is ``-Σ F(X_i - X_j) + Σ F(X_i - XP_j) - Σ F(XP_i - XP_j)``.
    """
    cdef Py_ssize_t P = XP.shape[0], M = XP.shape[1], B = XP.shape[2]
    cdef Py_ssize_t A = X.shape[1]
    if X.shape[0] != P:
        raise ValueError("X and XP disagree on the batch size")
    out = np.empty((P, M), dtype=np.float64)
    cdef double[:, ::1] res = out
    cdef Py_ssize_t p, m, i, j
    cdef double base, acc
    with nogil:
        for p in range(P):
            base = 0.0
            for i in range(A):
                for j in range(i + 1, A):
                    base -= _F(kind, lam, rate, X[p, i] - X[p, j])
            for m in range(M):
                acc = base
                for i in range(A):
                    for j in range(B):
                        acc += _F(kind, lam, rate, X[p, i] - XP[p, m, j])
                for i in range(B):
                    for j in range(i + 1, B):
                        acc -= _F(kind, lam, rate, XP[p, m, i] - XP[p, m, j])
                res[p, m] = acc
    return out
