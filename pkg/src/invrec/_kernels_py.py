"""Pure-numpy versions of the grid kernels in ``_kernels.pyx``."""
import numpy as np


def mode_fields(zr, zi, cos_t, sin_t):
    zr = np.asarray(zr)[:, None]
    zi = np.asarray(zi)[:, None]
    return zr * cos_t - zi * sin_t, zr * sin_t + zi * cos_t


def plane_mean(R, S, modes, w, a_idx, kind, F=None):
    V = np.asarray(w).T @ R[np.asarray(modes)]
    sq = np.einsum("dg,dg->g", V, V)
    if kind == 1:
        f = 2.0 * R[a_idx]
    elif kind == 2:
        f = 2.0 * (R[a_idx] ** 2 - S[a_idx] ** 2)
    elif F is not None:
        f = F
    else:
        return float(sq.mean())
    return float(np.dot(sq, f) / sq.size)


def square_mean(R, a_idx):
    r = 2.0 * R[a_idx]
    return float(np.dot(r, r) / r.size)


def plane_means(R, S, modes, w, a_idx, kind):
    return np.array(
        [plane_mean(R, S, modes[p], w[p], a_idx[p], kind[p]) for p in range(len(kind))]
    )


def fused_invariants(zr, zi, cos_g, sin_g, modes, w, a_idx, kind):
    R, S = mode_fields(zr, zi, cos_g.T, sin_g.T)
    planes = plane_means(R, S, modes, w, a_idx, kind)
    squares = np.array([square_mean(R, k) for k in range(R.shape[0])])
    return planes, squares
