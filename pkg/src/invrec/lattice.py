"""Dual-lattice geometry: bases, visible vectors, the 26-mode set and plane decompositions.

Vectors of the dual lattice are carried as integer coordinates relative to a
basis ``g1, g2, g3`` together with their Cartesian image.  Everything here is
pure and immutable.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CollinearInput, SearchBoundExhausted, SingularBasis, ZeroVector

ADMISSIBILITY_TOL = 1e-9
COPLANARITY_TOL = 1e-10
COLLINEAR_TOL = 1e-12
BETA_SEARCH_BOUND = 4

# gamma_1 .. gamma_13 as integer coordinates.  Entries 1..7 follow the standard
# labelling; 8..13 are this package's fixed convention.
REPRESENTATIVES: tuple[tuple[int, int, int], ...] = (
    (1, 0, 0),
    (0, 1, 0),
    (0, 0, 1),
    (0, 1, 1),
    (1, 0, 1),
    (1, 1, 0),
    (1, 1, 1),
    (1, -1, 0),
    (1, 0, -1),
    (0, 1, -1),
    (-1, 1, 1),
    (1, -1, 1),
    (1, 1, -1),
)

_REP_LOOKUP: dict[tuple[int, int, int], tuple[int, int]] = {}
for _k, _c in enumerate(REPRESENTATIVES, start=1):
    _REP_LOOKUP[_c] = (_k, 1)
    _REP_LOOKUP[(-_c[0], -_c[1], -_c[2])] = (_k, -1)


def mode_index(coeffs) -> tuple[int, int] | None:
    """Return ``(k, sign)`` with ``coeffs == sign * gamma_k``, or None outside Q(1,1,1)."""
    return _REP_LOOKUP.get(tuple(int(c) for c in coeffs))


class LatticeBasis:
    """Three linearly independent vectors spanning the dual lattice.

    Parameters
    ----------
    vectors : array_like, shape (3, 3)
        Rows are ``g1, g2, g3`` in Cartesian coordinates.
    """

    __slots__ = ("_g", "_key")

    def __init__(self, vectors):
        g = np.array(vectors, dtype=float)
        if g.shape != (3, 3) or not np.all(np.isfinite(g)):
            raise SingularBasis(f"basis must be a finite 3x3 array, got shape {g.shape}")
        scale = float(np.prod(np.linalg.norm(g, axis=1)))
        if scale == 0.0 or abs(np.linalg.det(g)) < 1e-12 * scale:
            raise SingularBasis("basis vectors are linearly dependent")
        g.setflags(write=False)
        self._g = g
        self._key = tuple(float(x) for x in g.ravel())

    @property
    def vectors(self) -> np.ndarray:
        return self._g

    @property
    def g1(self) -> np.ndarray:
        return self._g[0]

    @property
    def g2(self) -> np.ndarray:
        return self._g[1]

    @property
    def g3(self) -> np.ndarray:
        return self._g[2]

    def __eq__(self, other):
        return isinstance(other, LatticeBasis) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"LatticeBasis({self._g.tolist()!r})"

    def vector(self, *coeffs) -> "GammaVector":
        if len(coeffs) == 1:
            coeffs = tuple(coeffs[0])
        return GammaVector(tuple(int(c) for c in coeffs), self)

    def gamma(self, k: int) -> "GammaVector":
        """The representative gamma_k, ``k`` in 1..13."""
        return self.vector(REPRESENTATIVES[k - 1])


def default_basis() -> LatticeBasis:
    """The fixture {(1,0,0), (1,1,0), (1,1,2)} scaled by 2*pi."""
    return LatticeBasis(2 * np.pi * np.array([[1, 0, 0], [1, 1, 0], [1, 1, 2]], dtype=float))


@dataclass(frozen=True)
class GammaVector:
    coeffs: tuple[int, int, int]
    basis: LatticeBasis = field(compare=False, repr=False)
    cart: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        cart = np.asarray(self.coeffs, dtype=float) @ self.basis.vectors
        cart.setflags(write=False)
        object.__setattr__(self, "cart", cart)

    def __neg__(self):
        return GammaVector(tuple(-c for c in self.coeffs), self.basis)

    def __add__(self, other):
        return GammaVector(tuple(x + y for x, y in zip(self.coeffs, other.coeffs)), self.basis)

    def __sub__(self, other):
        return GammaVector(tuple(x - y for x, y in zip(self.coeffs, other.coeffs)), self.basis)

    def __rmul__(self, k):
        return GammaVector(tuple(int(k) * c for c in self.coeffs), self.basis)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.cart))


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    violations: list
    values: dict


@dataclass(frozen=True)
class Decomposition:
    """``b = s * beta + mu * a`` with ``beta`` orthogonal to ``a``."""

    s: int
    beta: np.ndarray
    mu: float


@dataclass(frozen=True)
class QSet:
    modes: list
    representatives: list


def dual_basis(basis: LatticeBasis) -> np.ndarray:
    """Rows ``w_j`` with ``<g_i, w_j> = 2*pi*delta_ij``."""
    return 2 * np.pi * np.linalg.inv(basis.vectors).T


def check_admissible(basis: LatticeBasis, tol: float = ADMISSIBILITY_TOL) -> AdmissibilityReport:
    """Evaluate the twelve inequalities a usable basis must satisfy.

    A value counts as nonzero when ``|value| > tol * scale`` with ``scale`` the
    product of the norms entering it.
    """
    g = basis.vectors
    n = np.linalg.norm(g, axis=1)
    values = {}
    scales = {}
    for i, j in ((0, 1), (0, 2), (1, 2)):
        tag = f"<g{i+1},g{j+1}>"
        values[tag] = float(g[i] @ g[j])
        scales[tag] = n[i] * n[j]
    for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        tag = f"<g{i+1}+g{j+1},g{k+1}>"
        s = g[i] + g[j]
        values[tag] = float(s @ g[k])
        scales[tag] = np.linalg.norm(s) * n[k]
    for i, j in ((0, 1), (0, 2), (1, 2)):
        tag = f"|g{i+1}|^2-|g{j+1}|^2"
        values[tag] = float(n[i] ** 2 - n[j] ** 2)
        scales[tag] = n[i] * n[j]
    total = g.sum(axis=0)
    for i in range(3):
        j, k = (x for x in range(3) if x != i)
        tag = f"<g1+g2+g3,g{i+1}-g{j+1}-g{k+1}>"
        d = g[i] - g[j] - g[k]
        values[tag] = float(total @ d)
        scales[tag] = np.linalg.norm(total) * np.linalg.norm(d)
    violations = [(tag, v) for tag, v in values.items() if not abs(v) > tol * scales[tag]]
    return AdmissibilityReport(admissible=not violations, violations=violations, values=values)


def is_visible(v) -> bool:
    """True iff the integer coordinates of ``v`` are coprime."""
    coeffs = v.coeffs if isinstance(v, GammaVector) else tuple(int(c) for c in v)
    if not any(coeffs):
        raise ZeroVector("the zero vector has no direction")
    return math.gcd(*(abs(c) for c in coeffs)) == 1


@lru_cache(maxsize=64)
def enumerate_Q(basis: LatticeBasis) -> QSet:
    reps = [basis.vector(c) for c in REPRESENTATIVES]
    return QSet(modes=reps + [-r for r in reps], representatives=reps)


def _collinear(x: np.ndarray, y: np.ndarray, tol: float = COLLINEAR_TOL) -> bool:
    return np.linalg.norm(np.cross(x, y)) <= tol * np.linalg.norm(x) * np.linalg.norm(y)


@lru_cache(maxsize=8)
def _search_grid(bound: int) -> np.ndarray:
    r = range(-bound, bound + 1)
    pts = np.array([p for p in itertools.product(r, r, r) if any(p)], dtype=float)
    return pts


def orthogonal_decompose(a: GammaVector, b: GammaVector, bound: int = BETA_SEARCH_BOUND) -> Decomposition:
    """Split ``b`` along the visible direction ``a`` and the plane orthogonal to it.

    The orthogonal lattice is realised as the projection of the whole lattice
    onto the plane ``<x, a> = 0``; ``beta`` is its shortest element on the line
    through the projection of ``b``, oriented so that ``s > 0``.
    """
    if not any(a.coeffs) or not any(b.coeffs):
        raise ZeroVector("decomposition needs nonzero vectors")
    if _collinear(a.cart, b.cart):
        raise CollinearInput(f"{b.coeffs} lies on the line through {a.coeffs}")
    A = a.cart
    aa = float(A @ A)
    mu = float(b.cart @ A) / aa
    pb = b.cart - mu * A

    cand = _search_grid(bound) @ a.basis.vectors
    proj = cand - np.outer(cand @ A, A) / aa
    pn = np.linalg.norm(proj, axis=1)
    pbn = np.linalg.norm(pb)
    cross = np.linalg.norm(np.cross(proj, pb), axis=1)
    ok = (pn > 1e-9 * pbn) & (cross <= 1e-9 * pn * pbn)
    if not ok.any():
        raise SearchBoundExhausted(f"no projected lattice vector parallel to b within bound {bound}")
    idx = np.flatnonzero(ok)
    beta = proj[idx[np.argmin(pn[idx])]].copy()
    if beta @ pb < 0:
        beta = -beta
    ratio = pbn / np.linalg.norm(beta)
    s = int(round(ratio))
    if s < 1 or abs(ratio - s) > 1e-8 * max(1.0, ratio):
        raise SearchBoundExhausted(f"projection of b is not an integer multiple of beta (ratio {ratio})")
    beta.setflags(write=False)
    return Decomposition(s=s, beta=beta, mu=mu)


def plane_modes(a: GammaVector, b: GammaVector, tol: float = COPLANARITY_TOL) -> list:
    """Elements of Q(1,1,1) in the plane spanned by ``a``, ``b`` but off the line through ``a``."""
    if _collinear(a.cart, b.cart):
        raise CollinearInput(f"{a.coeffs} and {b.coeffs} do not span a plane")
    A, B = a.cart, b.cart
    na, nb = np.linalg.norm(A), np.linalg.norm(B)
    out = []
    for c in enumerate_Q(a.basis).modes:
        C = c.cart
        if abs(np.linalg.det(np.array([A, B, C]))) >= tol * na * nb * np.linalg.norm(C):
            continue
        if _collinear(A, C, 1e-9):
            continue
        out.append(c)
    return out
