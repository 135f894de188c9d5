"""Grid-quadrature route for the invariants.

The unit cell ``{c1 w1 + c2 w2 + c3 w3 : c_i in [0, 1)}`` is sampled on an
``n x n x n`` tensor grid.  In cell coordinates ``<gamma_k, x> = 2 pi (k . c)``,
so the mode phases do not depend on the basis and are tabulated once per grid
size.  Every integrand is a trigonometric polynomial of degree at most 4 per
axis, so the grid mean is exact up to rounding for ``n >= 9``.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import kernels
from .invariants import _ARGS, InvariantSet, PlaneGeometry, _geometry
from .lattice import REPRESENTATIVES, GammaVector, dual_basis, mode_index
from .potential import PotentialCoefficients

DEFAULT_GRID = 48


@lru_cache(maxsize=4)
def cell_coordinates(n: int) -> np.ndarray:
    u = np.arange(n) / n
    return np.stack(np.meshgrid(u, u, u, indexing="ij"), axis=-1).reshape(-1, 3)


@lru_cache(maxsize=4)
def phase_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """cos and sin of ``<gamma_k, x>`` for k = 1..13 on the grid, shape (13, n**3)."""
    phase = 2 * np.pi * (np.asarray(REPRESENTATIVES, dtype=float) @ cell_coordinates(n).T)
    cos_t = np.ascontiguousarray(np.cos(phase))
    sin_t = np.ascontiguousarray(np.sin(phase))
    cos_t.setflags(write=False)
    sin_t.setflags(write=False)
    return cos_t, sin_t


@lru_cache(maxsize=2)
def point_major_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """:func:`phase_tables` transposed to shape (n**3, 13) for the fused kernel."""
    cos_t, sin_t = phase_tables(n)
    cos_g = np.ascontiguousarray(cos_t.T)
    sin_g = np.ascontiguousarray(sin_t.T)
    cos_g.setflags(write=False)
    sin_g.setflags(write=False)
    return cos_g, sin_g


def grid_points(basis, n: int) -> np.ndarray:
    """Cartesian grid points matching :func:`phase_tables`."""
    return cell_coordinates(n) @ dual_basis(basis)


def mode_fields(q: PotentialCoefficients, n: int = DEFAULT_GRID):
    cos_t, sin_t = phase_tables(n)
    z = q.z
    return kernels.mode_fields(
        np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag), cos_t, sin_t
    )


def plane_weights(geo: PlaneGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Representative indices and vector weights ``2 c / <beta, c>`` of a plane.

    The pair ``+-c`` contributes ``c/<beta,c> (z e + conj(z e)) = 2 c/<beta,c> Re(z e)``,
    so each pair reduces to one real field.
    """
    idx, w = [], []
    for c in geo.modes:
        k, _ = mode_index(c.coeffs)
        if k - 1 in idx:
            continue
        g = c.basis.gamma(k).cart
        idx.append(k - 1)
        w.append(2.0 * g / (g @ geo.beta))
    return np.asarray(idx, dtype=np.int64), np.ascontiguousarray(w, dtype=float)


def _direction_index(a) -> int:
    k, _ = mode_index(a)
    return k - 1


def invariant_I_quad(q: PotentialCoefficients, k: int, n: int = DEFAULT_GRID, fields=None) -> float:
    R, _ = fields if fields is not None else mode_fields(q, n)
    return kernels.square_mean(R, k - 1)


def _plane_invariant(q, a: GammaVector, b: GammaVector, kind: int, n: int, fields):
    R, S = fields if fields is not None else mode_fields(q, n)
    geo = _geometry(q.basis, a.coeffs, b.coeffs)
    modes, w = plane_weights(geo)
    return kernels.plane_mean(R, S, modes, w, _direction_index(a.coeffs), kind)


def invariant_I1_quad(q, a: GammaVector, b: GammaVector, n: int = DEFAULT_GRID, fields=None) -> float:
    return _plane_invariant(q, a, b, 1, n, fields)


def invariant_I2_quad(q, a: GammaVector, b: GammaVector, n: int = DEFAULT_GRID, fields=None) -> float:
    return _plane_invariant(q, a, b, 2, n, fields)


@lru_cache(maxsize=64)
def _batch_plan(basis):
    """Padded mode/weight arrays for every plane invariant, in ``_ARGS`` order."""
    keys, modes, w, a_idx, kinds = [], [], [], [], []
    for (fam, key), (kind, a, b, _) in _ARGS.items():
        if kind == "I":
            continue
        idx, wt = plane_weights(_geometry(basis, a, b))
        pad = 3 - len(idx)
        modes.append(np.concatenate([idx, np.zeros(pad, dtype=np.int64)]))
        w.append(np.concatenate([wt, np.zeros((pad, 3))]))
        a_idx.append(_direction_index(a))
        kinds.append(1 if kind == "I1" else 2)
        keys.append((fam, key))
    return (
        keys,
        np.ascontiguousarray(modes, dtype=np.int64),
        np.ascontiguousarray(w, dtype=float),
        np.asarray(a_idx, dtype=np.int64),
        np.asarray(kinds, dtype=np.int64),
    )


def quadrature_invariants(q: PotentialCoefficients, n: int = DEFAULT_GRID) -> InvariantSet:
    cos_g, sin_g = point_major_tables(n)
    keys, modes, w, a_idx, kinds = _batch_plan(q.basis)
    z = q.z
    vals, squares = kernels.fused_invariants(
        np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag), cos_g, sin_g, modes, w, a_idx, kinds
    )
    out = InvariantSet()
    for k in range(1, 14):
        out.I[k] = float(squares[k - 1])
    for (fam, key), v in zip(keys, vals):
        getattr(out, fam)[key] = float(v)
    return out
