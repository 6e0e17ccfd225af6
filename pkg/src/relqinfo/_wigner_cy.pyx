# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched little-group kernel (see _wigner_np for the fallback).

Per grid point: map the momentum through the Lorentz matrix, form
W = L^{-1}(lam p) lam L(p) with canonical rotation-free standard boosts,
and extract the SU(2) image of its spatial rotation block.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


cdef inline void _canonical_boost(double* p, double m, double[4][4] L) nogil:
    cdef int i, j
    cdef double denom = m * (m + p[0])
    L[0][0] = p[0] / m
    for i in range(3):
        L[0][i + 1] = p[i + 1] / m
        L[i + 1][0] = p[i + 1] / m
        for j in range(3):
            L[i + 1][j + 1] = p[i + 1] * p[j + 1] / denom
        L[i + 1][i + 1] += 1.0


cdef inline void _inverse_boost(double[4][4] L, double[4][4] Linv) nogil:
    # eta L^T eta with eta = diag(+,-,-,-): flips sign of time-space entries
    cdef int a, b
    for a in range(4):
        for b in range(4):
            Linv[a][b] = L[b][a]
    for a in range(1, 4):
        Linv[0][a] = -Linv[0][a]
        Linv[a][0] = -Linv[a][0]


cdef inline void _matmul4(double[4][4] A, double[4][4] B, double[4][4] C) nogil:
    cdef int i, j, k
    cdef double acc
    for i in range(4):
        for j in range(4):
            acc = 0.0
            for k in range(4):
                acc += A[i][k] * B[k][j]
            C[i][j] = acc


def wigner_su2_batch(cnp.ndarray[cnp.float64_t, ndim=2] lam,
                     cnp.ndarray[cnp.float64_t, ndim=2] P,
                     double m):
    """Boost an (N,4) on-shell momentum grid; see the NumPy twin for docs."""
    cdef Py_ssize_t n = P.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Q = np.empty((n, 4))
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] D = np.empty((n, 2, 2), dtype=np.complex128)
    cdef double[4][4] lamc, LP, LQ, LQinv, T, W
    cdef double p[4]
    cdef double q[4]
    cdef double R[3][3]
    cdef double quat[4]
    cdef double t, r, f, nrm
    cdef int i, j, best
    cdef Py_ssize_t idx

    for i in range(4):
        for j in range(4):
            lamc[i][j] = lam[i, j]

    for idx in range(n):
        for i in range(4):
            p[i] = P[idx, i]
        for i in range(4):
            q[i] = 0.0
            for j in range(4):
                q[i] += lamc[i][j] * p[j]
            Q[idx, i] = q[i]

        _canonical_boost(p, m, LP)
        _canonical_boost(q, m, LQ)
        _inverse_boost(LQ, LQinv)
        _matmul4(lamc, LP, T)
        _matmul4(LQinv, T, W)

        for i in range(3):
            for j in range(3):
                R[i][j] = W[i + 1][j + 1]

        # stable quaternion extraction (Shepperd), canonical branch w >= 0
        t = R[0][0] + R[1][1] + R[2][2]
        best = 0
        r = 1.0 + t
        if 1.0 + R[0][0] - R[1][1] - R[2][2] > r:
            r = 1.0 + R[0][0] - R[1][1] - R[2][2]
            best = 1
        if 1.0 - R[0][0] + R[1][1] - R[2][2] > r:
            r = 1.0 - R[0][0] + R[1][1] - R[2][2]
            best = 2
        if 1.0 - R[0][0] - R[1][1] + R[2][2] > r:
            r = 1.0 - R[0][0] - R[1][1] + R[2][2]
            best = 3
        if r < 0.0:
            r = 0.0
        r = sqrt(r) / 2.0
        f = 1.0 / (4.0 * r)
        if best == 0:
            quat[0] = r
            quat[1] = (R[2][1] - R[1][2]) * f
            quat[2] = (R[0][2] - R[2][0]) * f
            quat[3] = (R[1][0] - R[0][1]) * f
        elif best == 1:
            quat[0] = (R[2][1] - R[1][2]) * f
            quat[1] = r
            quat[2] = (R[0][1] + R[1][0]) * f
            quat[3] = (R[0][2] + R[2][0]) * f
        elif best == 2:
            quat[0] = (R[0][2] - R[2][0]) * f
            quat[1] = (R[0][1] + R[1][0]) * f
            quat[2] = r
            quat[3] = (R[1][2] + R[2][1]) * f
        else:
            quat[0] = (R[1][0] - R[0][1]) * f
            quat[1] = (R[0][2] + R[2][0]) * f
            quat[2] = (R[1][2] + R[2][1]) * f
            quat[3] = r

        nrm = sqrt(quat[0] * quat[0] + quat[1] * quat[1]
                   + quat[2] * quat[2] + quat[3] * quat[3])
        for i in range(4):
            quat[i] /= nrm
        if quat[0] < 0.0:
            for i in range(4):
                quat[i] = -quat[i]

        D[idx, 0, 0] = quat[0] - 1j * quat[3]
        D[idx, 0, 1] = -1j * quat[1] - quat[2]
        D[idx, 1, 0] = -1j * quat[1] + quat[2]
        D[idx, 1, 1] = quat[0] + 1j * quat[3]

    return Q, D
