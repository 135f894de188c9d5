"""The 26-mode trigonometric potential, its gauge actions and genericity checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonGeneric
from .lattice import REPRESENTATIVES, GammaVector, LatticeBasis, dual_basis, mode_index

GENERICITY_TOL = 1e-9
TWO_PI = 2 * np.pi


class PotentialCoefficients:
    """Fourier coefficients ``z(gamma_k)``, k = 1..13, on a fixed basis.

    Only the 13 representatives are stored; ``z(-gamma_k)`` is the complex
    conjugate, which keeps the potential real.
    """

    __slots__ = ("basis", "_z")

    def __init__(self, basis: LatticeBasis, z):
        z = np.array(z, dtype=complex)
        if z.shape != (13,):
            raise ValueError(f"expected 13 coefficients, got shape {z.shape}")
        if not np.all(np.isfinite(z)):
            raise ValueError("coefficients must be finite")
        zero = np.flatnonzero(z == 0)
        if zero.size:
            raise ValueError(f"coefficients must be nonzero; k = {[int(i) + 1 for i in zero]} vanish")
        z.setflags(write=False)
        self.basis = basis
        self._z = z

    @property
    def z(self) -> np.ndarray:
        return self._z

    def coef(self, k: int) -> complex:
        return complex(self._z[k - 1])

    def __call__(self, v) -> complex:
        """``z(v)`` for any lattice vector; zero outside Q(1,1,1)."""
        coeffs = v.coeffs if isinstance(v, GammaVector) else v
        hit = mode_index(coeffs)
        if hit is None:
            return 0j
        k, sign = hit
        zk = self._z[k - 1]
        return complex(zk if sign > 0 else np.conj(zk))

    def with_coef(self, k: int, value) -> "PotentialCoefficients":
        z = self._z.copy()
        z[k - 1] = value
        return PotentialCoefficients(self.basis, z)

    def __repr__(self):
        return f"PotentialCoefficients(basis={self.basis!r}, z={self._z.tolist()!r})"


@dataclass(frozen=True)
class PolarView:
    r: np.ndarray
    alpha: np.ndarray


@dataclass(frozen=True)
class GenericityReport:
    ok: bool
    failed: list
    values: dict


@dataclass(frozen=True)
class DirectionalProfile:
    """``Q(s) = z_plus e^{is} + z_minus e^{-is}``."""

    z_plus: complex
    z_minus: complex

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return 2.0 * np.real(self.z_plus * np.exp(1j * s))


def polar(q: PotentialCoefficients) -> PolarView:
    return PolarView(r=np.abs(q.z), alpha=np.mod(np.angle(q.z), TWO_PI))


def _rep_matrix(basis: LatticeBasis) -> np.ndarray:
    return np.asarray(REPRESENTATIVES, dtype=float) @ basis.vectors


def evaluate(q: PotentialCoefficients, x) -> np.ndarray | float:
    """Real value of the potential at one point or an array of points (..., 3)."""
    x = np.asarray(x, dtype=float)
    phase = x @ _rep_matrix(q.basis).T
    val = 2.0 * np.real(np.exp(1j * phase) @ q.z)
    return float(val) if val.ndim == 0 else val


def evaluate_complex(q: PotentialCoefficients, x) -> np.ndarray | complex:
    """Direct 26-term complex sum; its imaginary part is rounding noise."""
    x = np.asarray(x, dtype=float)
    gm = _rep_matrix(q.basis)
    full = np.concatenate([gm, -gm])
    coefs = np.concatenate([q.z, np.conj(q.z)])
    val = np.exp(1j * (x @ full.T)) @ coefs
    return complex(val) if np.ndim(val) == 0 else val


def translate(q: PotentialCoefficients, tau) -> PotentialCoefficients:
    """Coefficients of ``x -> q(x - tau)``."""
    tau = np.asarray(tau, dtype=float)
    return PotentialCoefficients(q.basis, q.z * np.exp(-1j * (_rep_matrix(q.basis) @ tau)))


def invert(q: PotentialCoefficients) -> PotentialCoefficients:
    """Coefficients of ``x -> q(-x)``."""
    return PotentialCoefficients(q.basis, np.conj(q.z))


def canonical_translation(q: PotentialCoefficients) -> tuple[PotentialCoefficients, np.ndarray]:
    """Translate so that z(gamma_1), z(gamma_2), z(gamma_3) become positive reals.

    Returns the translated coefficients and the shift ``tau``.  The first three
    coefficients are snapped to their moduli so the arguments are exactly 0.
    """
    alpha = np.mod(np.angle(q.z[:3]), TWO_PI)
    tau = (alpha / TWO_PI) @ dual_basis(q.basis)
    moved = translate(q, tau).z.copy()
    moved[:3] = np.abs(q.z[:3])
    return PotentialCoefficients(q.basis, moved), tau


def _genericity_values(z: np.ndarray) -> tuple[dict, dict]:
    a, b, r = z.real, z.imag, np.abs(z)
    vals, scales = {}, {}
    vals["b7"] = b[6]
    scales["b7"] = r[6]
    for s in (4, 5, 6):
        vals[f"a{s}*b{s}"] = a[s - 1] * b[s - 1]
        scales[f"a{s}*b{s}"] = r[s - 1] ** 2
        vals[f"b7*a{s}-a7*b{s}"] = b[6] * a[s - 1] - a[6] * b[s - 1]
        scales[f"b7*a{s}-a7*b{s}"] = r[6] * r[s - 1]
    for m, j in ((4, 5), (4, 6), (5, 6)):
        for sign, label in ((1, "+"), (-1, "-")):
            tag = f"b{j}*a{m}{label}b{m}*a{j}"
            vals[tag] = b[j - 1] * a[m - 1] + sign * b[m - 1] * a[j - 1]
            scales[tag] = r[j - 1] * r[m - 1]
    return vals, scales


def check_genericity(q: PotentialCoefficients, tol: float = GENERICITY_TOL) -> GenericityReport:
    """Evaluate the 13 product-form conditions on the translation-fixed coefficients.

    Inversion only flips the sign of every condition, so it is not applied.
    """
    fixed, _ = canonical_translation(q)
    vals, scales = _genericity_values(fixed.z)
    failed = [(tag, float(v)) for tag, v in vals.items() if not abs(v) > tol * scales[tag]]
    return GenericityReport(ok=not failed, failed=failed, values={k: float(v) for k, v in vals.items()})


def phase_combinations(q: PotentialCoefficients) -> dict:
    """Translation-invariant argument combinations, reduced mod 2*pi.

    These are the left-hand sides of the argument conditions that define the
    generic class (before fixing the translation gauge).
    """
    al = np.angle(q.z)

    def A(k):
        return al[k - 1]

    out = {"a7-a1-a2-a3": A(7) - A(1) - A(2) - A(3)}
    for s in (1, 2, 3):
        out[f"a7-a{s+3}-a{s}"] = A(7) - A(s + 3) - A(s)
    for m, j in ((1, 2), (1, 3), (2, 3)):
        out[f"a{m+3}-a{j+3}+a{m}-a{j}"] = A(m + 3) - A(j + 3) + A(m) - A(j)
    out["a4-a2-a3"] = A(4) - A(2) - A(3)
    out["a5-a1-a3"] = A(5) - A(1) - A(3)
    out["a6-a1-a2"] = A(6) - A(1) - A(2)
    out["a4+a5-a1-a2-2a3"] = A(4) + A(5) - A(1) - A(2) - 2 * A(3)
    out["a4+a6-a1-a3-2a2"] = A(4) + A(6) - A(1) - A(3) - 2 * A(2)
    out["a5+a6-a2-a3-2a1"] = A(5) + A(6) - A(2) - A(3) - 2 * A(1)
    return {k: float(np.mod(v, TWO_PI)) for k, v in out.items()}


def directional(q: PotentialCoefficients, a) -> DirectionalProfile:
    """One-variable profile of the directional potential along ``a``.

    Directions outside Q(1,1,1) carry no modes for this potential class, so the
    zero profile is returned for them.
    """
    coeffs = a.coeffs if isinstance(a, GammaVector) else tuple(a)
    zp = q(coeffs)
    return DirectionalProfile(z_plus=zp, z_minus=complex(np.conj(zp)))


def random_generic(
    basis: LatticeBasis,
    rng: np.random.Generator,
    max_draws: int = 10_000,
    r_range: tuple[float, float] = (0.2, 2.0),
) -> PotentialCoefficients:
    """Draw log-uniform moduli and uniform arguments until the genericity test passes."""
    lo, hi = np.log(r_range[0]), np.log(r_range[1])
    for _ in range(max_draws):
        r = np.exp(rng.uniform(lo, hi, size=13))
        alpha = rng.uniform(0.0, TWO_PI, size=13)
        q = PotentialCoefficients(basis, r * np.exp(1j * alpha))
        if check_genericity(q).ok:
            return q
    raise NonGeneric(f"no generic potential found in {max_draws} draws")
