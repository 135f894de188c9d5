"""Gauge fixing and the step-by-step reconstruction of the 13 coefficients.

The potential is recovered modulo translation and inversion.  The canonical
representative has ``z(gamma_1), z(gamma_2), z(gamma_3) > 0`` and
``Im z(gamma_7) > 0``.  Given an :class:`~invrec.invariants.InvariantSet` the
algorithm proceeds in three stages, each a small system solved by Cramer's rule:

1. moduli from ``I``, real parts of ``z(gamma_4..6)`` from ``I1_sum``, then
   ``z(gamma_7)`` together with the signs ``t_4, t_5, t_6`` of the imaginary
   parts of ``z(gamma_4..6)`` from ``I1_gamma``;
2. ``z(gamma_i - gamma_j)`` from the two ``I2_pair`` entries of each pair;
3. ``z(gamma_j + gamma_k - gamma_i)`` from ``I1_refl`` and ``I2_gamma``.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousSigns, BadModulus, NonGeneric
from .invariants import _ARGS, I1_FACTOR, I2_FACTOR, InvariantSet, _geometry, closed_forms
from .lattice import LatticeBasis
from .potential import PotentialCoefficients, canonical_translation, invert

log = logging.getLogger(__name__)

DET_TOL = 1e-9
IMAG_TOL = 1e-12
CLAMP_TOL = 1e-9
SIGN_TOL = 1e-8
TIE_RATIO = 1.1

# gamma_m = gamma_j + gamma_k for {i, j, k} = {1, 2, 3}, keyed by the missing i
SUM_INDEX = {1: 4, 2: 5, 3: 6}
# Step 2: pair (i, j) -> (index of gamma_i - gamma_j, index of gamma_i + gamma_j)
DIFF_INDEX = {(1, 2): (8, 6), (1, 3): (9, 5), (2, 3): (10, 4)}
# Step 3: i -> index of gamma_j + gamma_k - gamma_i
REFL_INDEX = {1: 11, 2: 12, 3: 13}


@dataclass(frozen=True)
class GaugeResult:
    """``q_fixed = invert(translate(q, tau))`` if ``inverted`` else ``translate(q, tau)``."""

    q_fixed: PotentialCoefficients
    tau: np.ndarray
    inverted: bool


@dataclass
class ReconstructionResult:
    q_hat: PotentialCoefficients
    sign_triple: tuple
    residuals: dict = field(default_factory=dict)
    condition_floor: float = math.inf
    survivors: int = 0


def gauge_fix(q: PotentialCoefficients) -> GaugeResult:
    """Move ``q`` to the canonical representative of its gauge orbit.

    Raises
    ------
    NonGeneric
        If ``Im z(gamma_7)`` vanishes after the translation, so the inversion
        cannot be fixed.
    """
    moved, tau = canonical_translation(q)
    z7 = moved.coef(7)
    if abs(z7.imag) <= IMAG_TOL * abs(z7):
        raise NonGeneric("Im z(gamma_7) = 0 after translation; inversion cannot be fixed")
    if z7.imag < 0:
        return GaugeResult(invert(moved), tau, True)
    return GaugeResult(moved, tau, False)


def compare_mod_gauge(q1: PotentialCoefficients, q2: PotentialCoefficients) -> float:
    """Largest coefficient difference between the canonical forms of two potentials."""
    z1 = gauge_fix(q1).q_fixed.z
    z2 = gauge_fix(q2).q_fixed.z
    return float(np.max(np.abs(z1 - z2)))


def perturb_invariants(inv: InvariantSet, eps: float, seed: int) -> InvariantSet:
    """Add ``eps * u * max(1, |v|)`` with ``u ~ U[-1, 1]`` to every entry ``v``."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    rng = np.random.default_rng(seed)
    u = iter(rng.uniform(-1.0, 1.0, size=len(inv)))
    return inv.map(lambda _, v: v + eps * next(u) * max(1.0, abs(v)))


class _Tracker:
    """Collects determinant floors and residuals across the solves."""

    def __init__(self):
        self.floor = math.inf
        self.residuals = {}

    def cramer2(self, m11, m12, m21, m22, r1, r2, label):
        det = m11 * m22 - m12 * m21
        scale = math.hypot(m11, m12) * math.hypot(m21, m22)
        self.floor = min(self.floor, abs(det))
        if not abs(det) >= DET_TOL * scale:
            raise NonGeneric(f"{label}: determinant {det:.3e} below {DET_TOL:g} x scale {scale:.3e}")
        x = (r1 * m22 - m12 * r2) / det
        y = (m11 * r2 - r1 * m21) / det
        self.residuals[f"{label}.1"] = abs(m11 * x + m12 * y - r1)
        self.residuals[f"{label}.2"] = abs(m21 * x + m22 * y - r2)
        return x, y


def _A(basis, fam, key):
    kind, a, b, _ = _ARGS[(fam, key)]
    geo = _geometry(basis, a, b)
    return I1_FACTOR * geo.A1 if kind == "I1" else I2_FACTOR * geo.A2


def _moduli(inv: InvariantSet) -> np.ndarray:
    r = np.empty(13)
    for k in range(1, 14):
        v = inv.I[k]
        if not v > 0:
            raise BadModulus(f"I({k}) = {v!r} is not positive")
        r[k - 1] = math.sqrt(v / 2.0)
    return r


def _imag_modulus(r: float, a: float, m: int) -> float:
    d = r * r - a * a
    if d < 0:
        if d < -CLAMP_TOL * max(1.0, r * r):
            raise BadModulus(f"|Re z(gamma_{m})| exceeds |z(gamma_{m})|: r^2 - a^2 = {d:.3e}")
        log.warning("clamping r^2 - a^2 = %.3e to 0 for gamma_%d", d, m)
        d = 0.0
    return math.sqrt(d)


def _solve_triple(a_m, b_abs, c, signs):
    """Least-squares ``(a7, b7)`` for one sign triple plus its feasibility data."""
    rows = [(a_m[i], signs[i] * b_abs[i]) for i in range(3)]
    s11 = sum(p * p for p, _ in rows)
    s12 = sum(p * q for p, q in rows)
    s22 = sum(q * q for _, q in rows)
    t1 = sum(p * ci for (p, _), ci in zip(rows, c))
    t2 = sum(q * ci for (_, q), ci in zip(rows, c))
    det = s11 * s22 - s12 * s12
    if det == 0:
        return None
    a7 = (t1 * s22 - s12 * t2) / det
    b7 = (s11 * t2 - s12 * t1) / det
    res = math.sqrt(sum((p * a7 + q * b7 - ci) ** 2 for (p, q), ci in zip(rows, c)))
    # b7 from each pair of equations by Cramer must be positive as well
    ratios = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        (p1, q1), (p2, q2) = rows[i], rows[j]
        dij = p1 * q2 - q1 * p2
        ratios.append((p1 * c[j] - p2 * c[i]) / dij if dij != 0 else -math.inf)
    feasible = b7 > 0 and all(x > 0 for x in ratios)
    return a7, b7, res, feasible


def _step1(inv, basis, r, track):
    a_m = {}
    for i, j in ((2, 3), (1, 3), (1, 2)):
        m = SUM_INDEX[6 - i - j]
        est = [
            inv.I1_sum[(p, s)] / (_A(basis, "I1_sum", (p, s)) * r[p - 1] * r[s - 1])
            for p, s in ((i, j), (j, i))
        ]
        a_m[m] = 0.5 * (est[0] + est[1])
        track.residuals[f"step1.re{m}"] = abs(est[0] - est[1])
    am = [a_m[m] for m in (4, 5, 6)]
    b_abs = [_imag_modulus(r[m - 1], a_m[m], m) for m in (4, 5, 6)]
    c = [inv.I1_gamma[i] / (_A(basis, "I1_gamma", i) * r[i - 1]) for i in (1, 2, 3)]
    scale = max(1.0, *(abs(x) for x in c))

    cands = []
    for signs in itertools.product((1, -1), repeat=3):
        sol = _solve_triple(am, b_abs, c, signs)
        if sol is not None and sol[3]:
            cands.append((sol[2], signs, sol[0], sol[1]))
    if not cands:
        raise AmbiguousSigns("no sign triple satisfies the positivity constraints")
    cands.sort(key=lambda t: t[0])
    survivors = sum(1 for t in cands if t[0] <= SIGN_TOL * scale)
    if len(cands) > 1 and cands[1][0] <= TIE_RATIO * cands[0][0]:
        raise AmbiguousSigns(
            f"sign triples {cands[0][1]} and {cands[1][1]} fit within {TIE_RATIO - 1:.0%} "
            f"(residuals {cands[0][0]:.3e}, {cands[1][0]:.3e})"
        )
    res, signs, a7, b7 = cands[0]
    track.residuals["step1.lsq"] = res
    z = {m: complex(am[n], signs[n] * b_abs[n]) for n, m in enumerate((4, 5, 6))}
    z[7] = complex(a7, b7)
    return z, signs, survivors


def _step2(inv, basis, r, z, track):
    out = {}
    for (i, j), (d, p) in DIFF_INDEX.items():
        ap, bp = z[p].real, z[p].imag
        c4 = inv.I2_pair[(i, j)] / (_A(basis, "I2_pair", (i, j)) * r[i - 1] ** 2)
        c5 = inv.I2_pair[(j, i)] / (_A(basis, "I2_pair", (j, i)) * r[j - 1] ** 2)
        x, y = track.cramer2(ap, -bp, ap, bp, c4, c5, f"step2.z{d}")
        out[d] = complex(x, y)
    return out


def _step3(inv, basis, r, z, track):
    out = {}
    a7, b7 = z[7].real, z[7].imag
    for i, k in REFL_INDEX.items():
        m = SUM_INDEX[i]
        am, bm = z[m].real, z[m].imag
        c1 = inv.I1_refl[i] / (_A(basis, "I1_refl", i) * r[i - 1])
        c2 = inv.I2_gamma[i] / (_A(basis, "I2_gamma", i) * r[i - 1] ** 2)
        x, y = track.cramer2(am, bm, a7, b7, c1, c2, f"step3.z{k}")
        out[k] = complex(x, y)
    return out


def reconstruct(inv: InvariantSet, basis: LatticeBasis) -> ReconstructionResult:
    """Recover the canonical coefficients from an invariant set.

    Parameters
    ----------
    inv : InvariantSet
        Values of every invariant family.
    basis : LatticeBasis
        Basis the invariants were computed on.

    Returns
    -------
    ReconstructionResult
        ``q_hat`` in canonical gauge, the selected sign triple, per-equation
        residuals and the smallest determinant met.  ``residuals`` also holds
        the mismatch between each solved modulus and ``sqrt(I/2)``.

    Raises
    ------
    NonGeneric, AmbiguousSigns, BadModulus
    """
    track = _Tracker()
    r = _moduli(inv)
    z = {k: complex(r[k - 1], 0.0) for k in (1, 2, 3)}
    z1, signs, survivors = _step1(inv, basis, r, track)
    z.update(z1)
    z.update(_step2(inv, basis, r, z, track))
    z.update(_step3(inv, basis, r, z, track))
    for k in range(7, 14):
        track.residuals[f"modulus{k}"] = abs(abs(z[k]) - r[k - 1])
    q_hat = PotentialCoefficients(basis, [z[k] for k in range(1, 14)])
    return ReconstructionResult(
        q_hat=q_hat,
        sign_triple=signs,
        residuals=track.residuals,
        condition_floor=track.floor,
        survivors=survivors,
    )


def stability_trial(q: PotentialCoefficients, eps: float, seed: int) -> float:
    """Gauge distance between ``q`` and its reconstruction from perturbed invariants."""
    inv = perturb_invariants(closed_forms(q), eps, seed)
    return compare_mod_gauge(q, reconstruct(inv, q.basis).q_hat)
