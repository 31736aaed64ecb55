# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched kernels; semantics match selinet._kernels_py.

Loops accumulate in ascending index order, which pins the summation
order (the numpy fallback delegates that to BLAS, so the two backends
agree only to rounding, not bitwise).
"""

import numpy as np

from libc.math cimport exp

ctypedef fused real:
    float
    double


def affine_fwd(real[:, ::1] X, real[:, ::1] W, real[::1] b):
    cdef Py_ssize_t B = X.shape[0], n = X.shape[1], m = W.shape[0]
    cdef Py_ssize_t i, j, k
    cdef real acc
    out_np = np.empty((B, m), dtype=np.float32 if real is float else np.float64)
    cdef real[:, ::1] Y = out_np
    for i in range(B):
        for j in range(m):
            acc = b[j]
            for k in range(n):
                acc += W[j, k] * X[i, k]
            Y[i, j] = acc
    return out_np


def affine_bwd(real[:, ::1] X, real[:, ::1] W, real[:, ::1] dY):
    cdef Py_ssize_t B = X.shape[0], n = X.shape[1], m = W.shape[0]
    cdef Py_ssize_t i, j, k
    cdef real g
    dtype = np.float32 if real is float else np.float64
    dX_np = np.zeros((B, n), dtype=dtype)
    dW_np = np.zeros((m, n), dtype=dtype)
    db_np = np.zeros(m, dtype=dtype)
    cdef real[:, ::1] dX = dX_np
    cdef real[:, ::1] dW = dW_np
    cdef real[::1] db = db_np
    for i in range(B):
        for j in range(m):
            g = dY[i, j]
            db[j] += g
            for k in range(n):
                dX[i, k] += g * W[j, k]
                dW[j, k] += g * X[i, k]
    return dX_np, dW_np, db_np


def attn_pool_fwd(real[:, :, ::1] F, real[::1] w, double b):
    cdef Py_ssize_t B = F.shape[0], C = F.shape[1], L = F.shape[2]
    cdef Py_ssize_t i, c, l
    cdef real acc, emax, esum, bias = <real> b
    dtype = np.float32 if real is float else np.float64
    V_np = np.zeros((B, C), dtype=dtype)
    A_np = np.empty((B, L), dtype=dtype)
    cdef real[:, ::1] V = V_np
    cdef real[:, ::1] A = A_np
    for i in range(B):
        for l in range(L):
            acc = bias
            for c in range(C):
                acc += w[c] * F[i, c, l]
            A[i, l] = acc
        emax = A[i, 0]
        for l in range(1, L):
            if A[i, l] > emax:
                emax = A[i, l]
        esum = 0
        for l in range(L):
            A[i, l] = <real> exp(A[i, l] - emax)
            esum += A[i, l]
        for l in range(L):
            A[i, l] /= esum
        for c in range(C):
            acc = 0
            for l in range(L):
                acc += F[i, c, l] * A[i, l]
            V[i, c] = acc
    return V_np, A_np


def attn_pool_bwd(real[:, :, ::1] F, real[:, ::1] alpha, real[:, ::1] dV):
    cdef Py_ssize_t B = F.shape[0], C = F.shape[1], L = F.shape[2]
    cdef Py_ssize_t i, c, l
    cdef real acc, dot, db = 0
    dtype = np.float32 if real is float else np.float64
    dw_np = np.zeros(C, dtype=dtype)
    da_np = np.empty(L, dtype=dtype)
    cdef real[::1] dw = dw_np
    cdef real[::1] da = da_np
    for i in range(B):
        for l in range(L):
            acc = 0
            for c in range(C):
                acc += F[i, c, l] * dV[i, c]
            da[l] = acc
        dot = 0
        for l in range(L):
            dot += alpha[i, l] * da[l]
        for l in range(L):
            da[l] = alpha[i, l] * (da[l] - dot)
        for l in range(L):
            db += da[l]
            for c in range(C):
                dw[c] += F[i, c, l] * da[l]
    return dw_np, float(db)


def mean_pool(real[:, :, ::1] F):
    cdef Py_ssize_t B = F.shape[0], C = F.shape[1], L = F.shape[2]
    cdef Py_ssize_t i, c, l
    cdef real acc
    V_np = np.empty((B, C), dtype=np.float32 if real is float else np.float64)
    cdef real[:, ::1] V = V_np
    for i in range(B):
        for c in range(C):
            acc = 0
            for l in range(L):
                acc += F[i, c, l]
            V[i, c] = acc / L
    return V_np
