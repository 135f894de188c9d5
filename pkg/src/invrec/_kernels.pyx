# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled grid kernels for the quadrature oracle."""
import numpy as np


def mode_fields(const double[::1] zr, const double[::1] zi,
                const double[:, ::1] cos_t, const double[:, ::1] sin_t):
    """R[k] = Re(z_k e^{i phase_k}), S[k] = Im(z_k e^{i phase_k}) on the grid."""
    cdef Py_ssize_t K = cos_t.shape[0], G = cos_t.shape[1], k, g
    cdef double a, b
    R = np.empty((K, G))
    S = np.empty((K, G))
    cdef double[:, ::1] Rv = R
    cdef double[:, ::1] Sv = S
    for k in range(K):
        a = zr[k]
        b = zi[k]
        for g in range(G):
            Rv[k, g] = a * cos_t[k, g] - b * sin_t[k, g]
            Sv[k, g] = a * sin_t[k, g] + b * cos_t[k, g]
    return R, S


def plane_mean(const double[:, ::1] R, const double[:, ::1] S,
               const long long[::1] modes, const double[:, ::1] w,
               Py_ssize_t a_idx, int kind, const double[::1] F=None):
    """Grid mean of |sum_c w_c R_c|^2 times a directional factor.

    kind 0: factor 1 (or ``F`` when given); kind 1: 2 R_a; kind 2: 2 (R_a^2 - S_a^2).
    """
    cdef Py_ssize_t G = R.shape[1], m = modes.shape[0], g, c
    cdef Py_ssize_t mc
    cdef double v0, v1, v2, r, f, ra, sa
    cdef double acc = 0.0
    for g in range(G):
        v0 = 0.0
        v1 = 0.0
        v2 = 0.0
        for c in range(m):
            mc = modes[c]
            r = R[mc, g]
            v0 += w[c, 0] * r
            v1 += w[c, 1] * r
            v2 += w[c, 2] * r
        if kind == 1:
            f = 2.0 * R[a_idx, g]
        elif kind == 2:
            ra = R[a_idx, g]
            sa = S[a_idx, g]
            f = 2.0 * (ra * ra - sa * sa)
        elif F is not None:
            f = F[g]
        else:
            f = 1.0
        acc += (v0 * v0 + v1 * v1 + v2 * v2) * f
    return acc / G


def square_mean(const double[:, ::1] R, Py_ssize_t a_idx):
    """Grid mean of (2 R_a)^2."""
    cdef Py_ssize_t G = R.shape[1], g
    cdef double acc = 0.0, r
    for g in range(G):
        r = 2.0 * R[a_idx, g]
        acc += r * r
    return acc / G


def plane_means(const double[:, ::1] R, const double[:, ::1] S,
                const long long[:, ::1] modes, const double[:, :, ::1] w,
                const long long[::1] a_idx, const long long[::1] kind):
    """Batched :func:`plane_mean` for kinds 1 and 2, one pass over the grid.

    ``modes`` is (P, 3) and ``w`` is (P, 3, 3); planes with fewer modes pad
    with zero weights.
    """
    cdef Py_ssize_t K = R.shape[0], G = R.shape[1], P = modes.shape[0]
    cdef Py_ssize_t g, p, c, k, mc
    cdef double r[16]
    cdef double s[16]
    cdef double v0, v1, v2, x, ra, sa, f
    if K > 16:
        raise ValueError("at most 16 mode fields supported")
    out = np.zeros(P)
    cdef double[::1] acc = out
    for g in range(G):
        for k in range(K):
            r[k] = R[k, g]
            s[k] = S[k, g]
        for p in range(P):
            v0 = 0.0
            v1 = 0.0
            v2 = 0.0
            for c in range(3):
                x = r[modes[p, c]]
                v0 += w[p, c, 0] * x
                v1 += w[p, c, 1] * x
                v2 += w[p, c, 2] * x
            ra = r[a_idx[p]]
            if kind[p] == 1:
                f = 2.0 * ra
            else:
                sa = s[a_idx[p]]
                f = 2.0 * (ra * ra - sa * sa)
            acc[p] += (v0 * v0 + v1 * v1 + v2 * v2) * f
    for p in range(P):
        acc[p] /= G
    return out


def fused_invariants(const double[::1] zr, const double[::1] zi,
                     const double[:, ::1] cos_g, const double[:, ::1] sin_g,
                     const long long[:, ::1] modes, const double[:, :, ::1] w,
                     const long long[::1] a_idx, const long long[::1] kind):
    """Plane means and squared-mode means without materialising the fields.

    ``cos_g``/``sin_g`` are point-major, shape (G, K).  Returns ``(planes, squares)``.
    """
    cdef Py_ssize_t G = cos_g.shape[0], K = cos_g.shape[1], P = modes.shape[0]
    cdef Py_ssize_t g, p, c, k
    cdef double r[16]
    cdef double s[16]
    cdef double v0, v1, v2, x, ra, sa, f, ct, st
    if K > 16:
        raise ValueError("at most 16 mode fields supported")
    planes = np.zeros(P)
    squares = np.zeros(K)
    cdef double[::1] acc = planes
    cdef double[::1] sq = squares
    for g in range(G):
        for k in range(K):
            ct = cos_g[g, k]
            st = sin_g[g, k]
            r[k] = zr[k] * ct - zi[k] * st
            s[k] = zr[k] * st + zi[k] * ct
            sq[k] += r[k] * r[k]
        for p in range(P):
            v0 = 0.0
            v1 = 0.0
            v2 = 0.0
            for c in range(3):
                x = r[modes[p, c]]
                v0 += w[p, c, 0] * x
                v1 += w[p, c, 1] * x
                v2 += w[p, c, 2] * x
            ra = r[a_idx[p]]
            if kind[p] == 1:
                f = 2.0 * ra
            else:
                sa = s[a_idx[p]]
                f = 2.0 * (ra * ra - sa * sa)
            acc[p] += (v0 * v0 + v1 * v1 + v2 * v2) * f
    for p in range(P):
        acc[p] /= G
    for k in range(K):
        sq[k] *= 4.0 / G
    return planes, squares
