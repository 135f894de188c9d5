"""One-dimensional Hill problems by truncated Fourier matrices.

Two separate problems live here.

* The twisted problem on ``[0, 2 pi]``::

      -|delta|^2 y'' + Q(s) y = mu y,    y(2 pi) = e^{2 pi i v} y(0)

  with ``Q(s) = sum_n z_n e^{ins}``.  In the basis ``e^{i(n+v)s}`` it is the
  Hermitian matrix ``|delta|^2 (n+v)^2 [n=n'] + z_{n-n'}``.

* The period-``pi`` operator ``-y'' + p(x) y`` with ``p(x) = sum_s p_s e^{2isx}``
  whose periodic and antiperiodic eigenvalues on ``[0, pi]`` bound the
  spectral gaps.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import GapUnderflow, InterlacingViolation, TruncationTooSmall
from .lattice import GammaVector
from .potential import PotentialCoefficients

TRUNCATION_MARGIN = 10
GAP_FLOOR = 1e-13


def _hermitian_coefficients(coefficients) -> dict:
    """Fill in ``z_{-n} = conj(z_n)`` and check consistency; drop zeros."""
    out = {}
    for n, c in dict(coefficients).items():
        n, c = int(n), complex(c)
        if n == 0:
            if c != 0:
                raise ValueError("the mean coefficient must be zero")
            continue
        for key, val in ((n, c), (-n, c.conjugate())):
            if key in out and abs(out[key] - val) > 1e-14 * max(1.0, abs(val)):
                raise ValueError(f"coefficients at {n} and {-n} are not conjugate")
            out[key] = val
    return {n: c for n, c in out.items() if c != 0}


def _max_frequency(coefficients) -> int:
    return max((abs(n) for n in coefficients), default=0)


@dataclass(frozen=True)
class HillProblem:
    """Twisted Hill problem ``T_v(Q)`` on ``[0, 2 pi]``.

    Parameters
    ----------
    delta_norm : float
        ``|delta| > 0``, the length of the direction vector.
    coefficients : dict
        Fourier coefficients ``n -> z_n`` of ``Q``.  Missing negative indices
        are filled by conjugation; ``z_0`` must vanish.
    v : float
        Quasimomentum in ``[0, 1)``.
    truncation : int
        Fourier cutoff ``N_t``; the matrix has size ``2 N_t + 1``.
    """

    delta_norm: float
    coefficients: dict
    v: float
    truncation: int

    def __post_init__(self):
        if not self.delta_norm > 0:
            raise ValueError("delta_norm must be positive")
        if not 0.0 <= self.v < 1.0:
            raise ValueError("v must lie in [0, 1)")
        object.__setattr__(self, "coefficients", _hermitian_coefficients(self.coefficients))

    @classmethod
    def from_potential(cls, q: PotentialCoefficients, delta: GammaVector, v: float, truncation: int):
        """Directional problem of ``q`` along ``delta``: only ``+-delta`` carry modes."""
        zp = q(delta)
        coeffs = {1: zp} if zp != 0 else {}
        return cls(delta.norm, coeffs, v, truncation)

    @property
    def max_frequency(self) -> int:
        return _max_frequency(self.coefficients)

    def indices(self) -> np.ndarray:
        return np.arange(-self.truncation, self.truncation + 1)

    def matrix(self) -> np.ndarray:
        need = 2 * self.max_frequency + TRUNCATION_MARGIN
        if self.truncation < need:
            raise TruncationTooSmall(f"N_t = {self.truncation} < 2*max frequency + {TRUNCATION_MARGIN} = {need}")
        n = self.indices()
        M = np.diag(self.delta_norm**2 * (n + self.v) ** 2).astype(complex)
        size = n.size
        for k, c in self.coefficients.items():
            # M[row, col] = z_{row - col}
            if abs(k) < size:
                M += np.diag(np.full(size - abs(k), c), -k)
        return M


@dataclass(frozen=True)
class HillSpectrum:
    eigenvalues: np.ndarray
    problem: HillProblem


def spectrum(p: HillProblem) -> HillSpectrum:
    """All eigenvalues of the truncated matrix, ascending."""
    return HillSpectrum(np.linalg.eigvalsh(p.matrix()), p)


def free_level(p: HillProblem, j: int) -> float:
    return p.delta_norm**2 * (j + p.v) ** 2


def level(p: HillProblem, j: int, vectors: bool = False):
    """Eigenvalue nearest the free level ``|delta|^2 (j+v)^2``.

    With ``vectors=True`` also returns the unit eigenvector, indexed like
    :meth:`HillProblem.indices`; its entries are the Fourier coefficients of
    ``phi(s) e^{-ivs}`` normalized to mean ``|phi|^2 = 1``.
    """
    if abs(j) > p.truncation - TRUNCATION_MARGIN:
        raise TruncationTooSmall(f"level {j} too close to the cutoff N_t = {p.truncation}")
    M = p.matrix()
    if vectors:
        w, V = np.linalg.eigh(M)
    else:
        w = np.linalg.eigvalsh(M)
    i = int(np.argmin(np.abs(w - free_level(p, j))))
    return (float(w[i]), V[:, i]) if vectors else float(w[i])


def second_order_shift(mu: float, n: int, v: float, delta_norm: float = 1.0) -> float:
    """Second-order perturbative shift of level ``n`` for ``Q = 2 mu cos s``."""
    return mu**2 * 2.0 / (4.0 * (n + v) ** 2 - 1.0) / delta_norm**2


# -- period-pi gaps --------------------------------------------------------


@dataclass
class GapReport:
    """Periodic/antiperiodic eigenvalue pairs ``lambda_{n,1} <= lambda_{n,2}``."""

    lambda0: float
    n: np.ndarray
    lam1: np.ndarray
    lam2: np.ndarray
    gaps: np.ndarray
    resolution: float = GAP_FLOOR


def _parity_matrix(p_coeffs: dict, freqs: np.ndarray) -> np.ndarray:
    """``-d^2/dx^2 + p`` on ``e^{ikx}``, ``k`` in ``freqs`` (all of one parity)."""
    M = np.diag(freqs.astype(float) ** 2).astype(complex)
    diff = (freqs[:, None] - freqs[None, :]) // 2
    for s, c in p_coeffs.items():
        M[diff == s] += c
    return M


def _eigvalsh_mp(M: np.ndarray, dps: int) -> list:
    with mpmath.workdps(dps):
        if np.all(M.imag == 0):
            A = mpmath.matrix(M.real.tolist())
            E = mpmath.eigsy(A, eigvals_only=True)
        else:
            A = mpmath.matrix([[mpmath.mpc(x.real, x.imag) for x in row] for row in M])
            E = mpmath.eighe(A, eigvals_only=True)
        return sorted(E[i] for i in range(len(E)))


def gap_lengths(p_coeffs: dict, n_max: int, truncation: int | None = None, dps: int | None = None) -> GapReport:
    """Gaps ``|gamma_n| = lambda_{n,2} - lambda_{n,1}``, n = 1..n_max, of ``-y'' + p y``.

    ``p_coeffs`` maps ``s -> p_s`` in ``p(x) = sum p_s e^{2isx}``; missing
    negative indices are filled by conjugation.  Periodic eigenvalues on
    ``[0, pi]`` use ``e^{ikx}`` with even ``k``, antiperiodic ones odd ``k``.
    ``truncation`` bounds ``|k| <= 2 * truncation + 1``.

    In double precision each eigenvalue carries an absolute error of order
    ``eps * ||M||``, so gaps below ``report.resolution`` are noise.  Passing
    ``dps`` solves in multiprecision instead and the resolution drops to
    :data:`GAP_FLOOR`.

    Raises
    ------
    TruncationTooSmall
        If the frequency cutoff does not clear ``n_max`` by the margin.
    InterlacingViolation
        If the computed eigenvalues break the chain
        ``lambda_0 < lambda_{1,1} <= lambda_{1,2} < lambda_{2,1} <= ...``.
    """
    p = _hermitian_coefficients(p_coeffs)
    deg = _max_frequency(p)
    if truncation is None:
        truncation = n_max + 2 * deg + 2 * TRUNCATION_MARGIN
    if truncation < n_max + 2 * deg + TRUNCATION_MARGIN:
        raise TruncationTooSmall(f"cutoff {truncation} too small for n_max = {n_max} and degree {deg}")
    m = np.arange(-truncation, truncation + 1)
    even = 2 * m
    odd = np.concatenate([2 * m - 1, [2 * truncation + 1]])
    Mp, Ma = _parity_matrix(p, even), _parity_matrix(p, odd)
    if dps is None:
        per, anti = np.linalg.eigvalsh(Mp), np.linalg.eigvalsh(Ma)
        norm = max(np.abs(per).max(), np.abs(anti).max())
        resolution = max(GAP_FLOOR, 64 * np.finfo(float).eps * norm)
    else:
        per, anti = _eigvalsh_mp(Mp, dps), _eigvalsh_mp(Ma, dps)
        resolution = GAP_FLOOR

    n = np.arange(1, n_max + 1)
    lam1 = np.empty(n_max)
    lam2 = np.empty(n_max)
    gaps = np.empty(n_max)
    for i, k in enumerate(n):
        src = per if k % 2 == 0 else anti
        base = 1 + 2 * (k // 2 - 1) if k % 2 == 0 else 2 * (k // 2)
        lo, hi = src[base], src[base + 1]
        lam1[i], lam2[i], gaps[i] = float(lo), float(hi), float(hi - lo)
    report = GapReport(float(per[0]), n, lam1, lam2, gaps, float(resolution))
    check_interlacing(report)
    return report


def check_interlacing(report: GapReport) -> None:
    chain = [report.lambda0]
    for a, b in zip(report.lam1, report.lam2):
        chain += [a, b]
    for i in range(1, len(chain)):
        strict = i % 2 == 1  # entering a new level
        ok = chain[i] > chain[i - 1] if strict else chain[i] >= chain[i - 1]
        if not ok:
            raise InterlacingViolation(f"chain breaks at position {i}: {chain[i - 1]!r} -> {chain[i]!r}")


def first_underflow(gaps, floor: float = GAP_FLOOR):
    """Index of the first gap below ``floor``, or None."""
    hit = np.flatnonzero(np.asarray(gaps) < floor)
    return int(hit[0]) if hit.size else None


def checked_gaps(p_coeffs: dict, n_max: int, truncation: int | None = None, dps: int | None = None) -> np.ndarray:
    """Gap lengths up to ``n_max``; raises GapUnderflow at the first unresolved one."""
    report = gap_lengths(p_coeffs, n_max, truncation, dps)
    i = first_underflow(report.gaps, report.resolution)
    if i is not None:
        raise GapUnderflow(f"|gamma_{i + 1}| = {report.gaps[i]:.3e} below {report.resolution:.1e}")
    return report.gaps


@dataclass
class DecayReport:
    """Gap sequences of two potentials and their ordering on a range of ``n``.

    Gaps below ``floor`` are unresolved and stored as NaN in
    ``log_high``/``log_low``; for ordering they count as ``< floor``.  Indices
    where both gaps are unresolved carry no ordering information and are left
    out of ``compared``.
    """

    n: np.ndarray
    gaps_high: np.ndarray
    gaps_low: np.ndarray
    log_high: np.ndarray
    log_low: np.ndarray
    slope_high: float
    slope_low: float
    compared: list
    high_dominates: dict
    floor: float = GAP_FLOOR

    @property
    def ordering_holds(self) -> bool:
        return bool(self.compared) and all(self.high_dominates[n] for n in self.compared)


def _fit_slope(n, logs) -> float:
    ok = np.isfinite(logs)
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(n[ok], logs[ok], 1)[0])


def gap_decay_compare(
    p_high: dict, p_low: dict, n_range, threshold: float = 1e-2, step: int = 1, dps: int | None = 40
) -> DecayReport:
    """Compare gap decay of a higher-degree and a lower-degree potential.

    Parameters
    ----------
    p_high, p_low : dict
        Coefficients ``s -> p_s`` (see :func:`gap_lengths`); ``p_high`` has the
        larger top frequency.
    n_range : iterable of int
        Gap indices to report.
    threshold : float
        Only indices where both gaps are below it enter the ordering.
    step : int
        Compare only indices divisible by ``step``.  A potential whose
        frequencies share a common factor ``d`` has every gap with ``d ∤ n``
        closed, so with ``step = 1`` those indices fall out as unresolved pairs.
    dps : int or None
        Working precision for the eigen-solves; None uses double precision,
        whose noise floor (``report.resolution``) is far above ``GAP_FLOOR``.
    """
    n = np.asarray(list(n_range))
    n_max = int(n.max())
    rh = gap_lengths(p_high, n_max, dps=dps)
    rl = gap_lengths(p_low, n_max, dps=dps)
    floor = max(rh.resolution, rl.resolution)
    gh, gl = rh.gaps[n - 1], rl.gaps[n - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        lh = np.where(gh >= floor, np.log(np.abs(gh)), np.nan)
        ll = np.where(gl >= floor, np.log(np.abs(gl)), np.nan)
    compared, dom = [], {}
    for k, a, b in zip(n, gh, gl):
        if k % step or not (a < threshold and b < threshold):
            continue
        if a < floor and b < floor:
            continue
        compared.append(int(k))
        dom[int(k)] = bool(a > max(b, floor))
    return DecayReport(n, gh, gl, lh, ll, _fit_slope(n, lh), _fit_slope(n, ll), compared, dom, floor)


# -- inverse-power probe ---------------------------------------------------


@dataclass
class C3Report:
    """Least-squares fit of ``mu_j - |delta|^2 (j+v)^2`` on ``j^-1 .. j^-4``.

    ``c3_mass`` is the ``j^-3`` value predicted from the directional L2 mass,
    ``sum_n |z_n|^2 / (8 |delta|^3)``.  ``c2_perturbative`` is the large-``j``
    limit of second-order perturbation theory, ``sum_{n>0} |z_n|^2 / (2 |delta|^2)``
    (each harmonic contributes the same ``j^-2`` term).
    """

    j: np.ndarray
    residual: np.ndarray
    coefficients: np.ndarray
    fit_residual: float
    c3_mass: float
    c2_perturbative: float


def c3_probe(p: HillProblem, j_range) -> C3Report:
    j = np.asarray(list(j_range), dtype=float)
    if j.size < 4:
        raise ValueError("need at least four levels to fit four coefficients")
    M = p.matrix()
    w = np.linalg.eigvalsh(M)
    free = p.delta_norm**2 * (j + p.v) ** 2
    if np.max(np.abs(j)) > p.truncation - TRUNCATION_MARGIN:
        raise TruncationTooSmall(f"levels up to {int(np.max(np.abs(j)))} need N_t > {int(np.max(np.abs(j))) + TRUNCATION_MARGIN}")
    mu = np.array([w[np.argmin(np.abs(w - f))] for f in free])
    res = mu - free
    X = np.stack([j**-k for k in range(1, 5)], axis=1)
    coef, *_ = np.linalg.lstsq(X, res, rcond=None)
    fit = float(np.linalg.norm(X @ coef - res))
    mass = sum(abs(c) ** 2 for c in p.coefficients.values())
    amp2 = sum(abs(c) ** 2 for n, c in p.coefficients.items() if n > 0)
    return C3Report(
        j=j,
        residual=res,
        coefficients=coef,
        fit_residual=fit,
        c3_mass=float(mass / (8.0 * p.delta_norm**3)),
        c2_perturbative=float(amp2 / (2.0 * p.delta_norm**2)),
    )
