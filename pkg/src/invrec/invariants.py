"""Spectral invariants I, I1, I2 of a 26-mode potential.

Each invariant is defined by its integral over the unit cell (measure 1):

* ``I(a)      = int |q^a|^2``
* ``I1(a, b)  = int |q_{a,beta}|^2 q^a``
* ``I2(a, b)  = int |q_{a,beta}|^2 (z(a)^2 e^{2i<a,x>} + c.c.)``

with ``q_{a,beta} = sum_c c / <beta, c> z(c) e^{i<c,x>}`` over the modes of the
plane through ``a`` and ``b``.  Three routes compute them: Parseval-expanded
general sums, closed forms in the A-coefficients, and grid quadrature
(:mod:`invrec.quadrature`).

Expanding the integrals gives the closed forms with fixed factors relative to
the A-coefficients: ``I1 = -A1 Re(...)`` and ``I2 = -2 A2 Re(...)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .lattice import GammaVector, LatticeBasis, orthogonal_decompose, plane_modes
from .potential import PotentialCoefficients

I1_FACTOR = -1.0
I2_FACTOR = -2.0

PAIRS = ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2))
SINGLES = (1, 2, 3)

_E = {1: (1, 0, 0), 2: (0, 1, 0), 3: (0, 0, 1)}
_GAMMA = (1, 1, 1)


def _add(*vs):
    return tuple(sum(c) for c in zip(*vs))


def _scale(k, v):
    return tuple(k * c for c in v)


@dataclass
class InvariantSet:
    """Values of every invariant the reconstruction consumes.

    Keys of the pair maps are ordered ``(i, j)`` with ``i != j`` in 1..3.
    """

    I: dict = field(default_factory=dict)
    I1_sum: dict = field(default_factory=dict)
    I1_diff: dict = field(default_factory=dict)
    I1_gamma: dict = field(default_factory=dict)
    I1_refl: dict = field(default_factory=dict)
    I2_pair: dict = field(default_factory=dict)
    I2_gamma: dict = field(default_factory=dict)

    FAMILIES = ("I", "I1_sum", "I1_diff", "I1_gamma", "I1_refl", "I2_pair", "I2_gamma")

    def entries(self):
        """``((family, key), value)`` pairs in a fixed order."""
        for fam in self.FAMILIES:
            d = getattr(self, fam)
            for key in sorted(d):
                yield (fam, key), d[key]

    def map(self, fn) -> "InvariantSet":
        out = InvariantSet()
        for (fam, key), v in self.entries():
            getattr(out, fam)[key] = fn((fam, key), v)
        return out

    def get(self, fam, key):
        return getattr(self, fam)[key]

    def max_abs_diff(self, other: "InvariantSet") -> float:
        return max(abs(v - other.get(*k)) for k, v in self.entries())

    def max_rel_diff(self, other: "InvariantSet") -> float:
        """``max |x - y| / (1 + |x|)`` over all entries."""
        return max(abs(v - other.get(*k)) / (1.0 + abs(v)) for k, v in self.entries())

    def __len__(self):
        return sum(len(getattr(self, f)) for f in self.FAMILIES)


# (family, key) -> (kind, a, b, closed-form factor list)
# The closed-form product is Re(prod_n z(v_n)) over the listed vectors.
def invariant_arguments():
    """Argument vectors for every entry of an InvariantSet, as integer triples."""
    table = {}
    for k in range(1, 14):
        table[("I", k)] = ("I", k, None, None)
    for i, j in PAIRS:
        ei, ej = _E[i], _E[j]
        a = _add(ei, ej)
        table[("I1_sum", (i, j))] = ("I1", a, ei, (_scale(-1, a), ej, ei))
        a = _add(ei, _scale(-1, ej))
        table[("I1_diff", (i, j))] = ("I1", a, ei, (_scale(-1, a), _scale(-1, ej), ei))
        table[("I2_pair", (i, j))] = (
            "I2", ei, ej, (_scale(-1, ei), _scale(-1, ei), _add(ei, ej), _add(ei, _scale(-1, ej))))
    for i in SINGLES:
        ei = _E[i]
        g_minus = _add(_GAMMA, _scale(-1, ei))
        table[("I1_gamma", i)] = ("I1", _GAMMA, ei, (_scale(-1, _GAMMA), g_minus, ei))
        refl = _add(_scale(2, ei), _scale(-1, _GAMMA))
        table[("I1_refl", i)] = ("I1", refl, ei, (_scale(-1, refl), _scale(-1, g_minus), ei))
        table[("I2_gamma", i)] = ("I2", ei, g_minus, (_scale(-1, ei), _scale(-1, ei), _GAMMA, refl))
    return table


_ARGS = invariant_arguments()


@dataclass(frozen=True)
class PlaneGeometry:
    beta: np.ndarray
    modes: tuple
    A1: float
    A2: float


@lru_cache(maxsize=4096)
def _geometry(basis: LatticeBasis, a: tuple, b: tuple) -> PlaneGeometry:
    av, bv = basis.vector(a), basis.vector(b)
    beta = orthogonal_decompose(av, bv).beta
    modes = tuple(plane_modes(av, bv))
    A, B = av.cart, bv.cart
    A1 = 2.0 * ((B @ beta) ** -2 + ((A - B) @ beta) ** -2) * ((A - B) @ B)
    A2 = 2.0 * ((A - B) @ (A + B)) * (B @ beta) ** -2
    return PlaneGeometry(beta=beta, modes=modes, A1=float(A1), A2=float(A2))


def geometry(a: GammaVector, b: GammaVector) -> PlaneGeometry:
    return _geometry(a.basis, a.coeffs, b.coeffs)


def invariant_I(q: PotentialCoefficients, k: int) -> float:
    """Parseval value of ``int |q^{gamma_k}|^2``: ``2 |z(gamma_k)|^2``."""
    return 2.0 * abs(q.coef(k)) ** 2


def coeff_A1(a: GammaVector, b: GammaVector) -> float:
    return geometry(a, b).A1


def coeff_A2(a: GammaVector, b: GammaVector) -> float:
    return geometry(a, b).A2


def invariant_I1_sum(q: PotentialCoefficients, a: GammaVector, b: GammaVector) -> float:
    geo = geometry(a, b)
    A = a.cart
    acc = 0j
    for c in geo.modes:
        zac = q(a - c)
        if zac == 0:
            continue
        C = c.cart
        acc += (C @ (C - A)) / (C @ geo.beta) ** 2 * zac * q(c)
    return float(2.0 * np.real(q(-a) * acc))


def invariant_I2_sum(q: PotentialCoefficients, a: GammaVector, b: GammaVector) -> float:
    geo = geometry(a, b)
    A = a.cart
    acc = 0j
    for c in geo.modes:
        zp, zm = q(a + c), q(a - c)
        if zp == 0 or zm == 0:
            continue
        C = c.cart
        acc += ((A + C) @ (C - A)) / (C @ geo.beta) ** 2 * zp * zm
    return float(2.0 * np.real(q(-a) ** 2 * acc))


def _closed_entry(q, basis, kind, a, b, factors):
    if kind == "I":
        return invariant_I(q, a)
    prod = 1.0 + 0j
    for v in factors:
        prod *= q(v)
    geo = _geometry(basis, a, b)
    if kind == "I1":
        return I1_FACTOR * geo.A1 * float(np.real(prod))
    return I2_FACTOR * geo.A2 * float(np.real(prod))


def closed_forms(q: PotentialCoefficients) -> InvariantSet:
    out = InvariantSet()
    for (fam, key), (kind, a, b, factors) in _ARGS.items():
        getattr(out, fam)[key] = _closed_entry(q, q.basis, kind, a, b, factors)
    return out


def general_sums(q: PotentialCoefficients) -> InvariantSet:
    out = InvariantSet()
    basis = q.basis
    for (fam, key), (kind, a, b, _) in _ARGS.items():
        if kind == "I":
            val = invariant_I(q, a)
        elif kind == "I1":
            val = invariant_I1_sum(q, basis.vector(a), basis.vector(b))
        else:
            val = invariant_I2_sum(q, basis.vector(a), basis.vector(b))
        getattr(out, fam)[key] = val
    return out


def compute_invariants(q: PotentialCoefficients, route: str = "closed", grid: int = 48) -> InvariantSet:
    if route == "closed":
        return closed_forms(q)
    if route == "sum":
        return general_sums(q)
    if route == "quad":
        from .quadrature import quadrature_invariants

        return quadrature_invariants(q, grid)
    raise ValueError(f"unknown route {route!r}")
