"""Recovering mu_j, J and the asymptotic coefficients from band-function samples.

The band data are synthetic.  For a direction ``delta`` in Q(1,1,1) and sample
points ``p_s = beta_s + tau`` in the plane orthogonal to ``delta``::

    Lambda(j, s) = |p_s|^2 + mu_j(v) + 1/4 sum_k |b_k|^4 / <p_s, b_k>^2 J(delta, b_k, j, v) + noise

where ``b_1..b_m`` are pairwise independent projections of the modes onto
that plane.  ``mu_j`` and ``J`` come from the one-dimensional Hill problem
along ``delta``.  The noise has size ``rho^(-3a + 2 alpha1) ln rho`` while
``Lambda ~ rho^2``, so synthesis and all solves run in multiprecision.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from . import kernels
from .errors import IllConditioned
from .hill import HillProblem, level
from .invariants import _geometry
from .lattice import GammaVector, enumerate_Q, orthogonal_decompose, plane_modes
from .potential import PotentialCoefficients
from .quadrature import DEFAULT_GRID, cell_coordinates, mode_fields, plane_weights

ALPHA = Fraction(1, 432)
ALPHA1 = 3 * ALPHA
A_EXP = 406 * ALPHA
MU_EXPONENT = float(-3 * A_EXP + 2 * ALPHA1)  # -101/36
J_EXPONENT = float(-A_EXP + 2 * ALPHA1)  # -400/432
DPS = 60
C_CAP = 6
J_CAP = 5


def _mp(x):
    return mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x


def _dot(u, v):
    return sum((_mp(a) * _mp(b) for a, b in zip(u, v)), mpmath.mpf(0))


def projection_directions(delta: GammaVector) -> list:
    """Pairwise independent ``b_k``: visible projections of Q minus the delta line.

    Returns ``(b, modes)`` pairs in enumeration order, where ``modes`` are the
    elements of Q lying in the plane through ``delta`` and ``b``.
    """
    out = []
    for c in enumerate_Q(delta.basis).modes:
        if np.linalg.norm(np.cross(c.cart, delta.cart)) <= 1e-9 * c.norm * delta.norm:
            continue
        beta = orthogonal_decompose(delta, c).beta
        if any(np.linalg.norm(np.cross(beta, b)) <= 1e-9 * np.linalg.norm(beta) * np.linalg.norm(b) for b, _, _ in out):
            continue
        out.append((beta, c, plane_modes(delta, c)))
    return out


@dataclass
class ExtractionGeometry:
    """Sample points ``p_s = beta_s + tau`` in the plane orthogonal to ``delta``.

    ``p_0`` has comparable inner products with every ``b_k``; for ``s >= 1``
    ``<p_s, b_s> = rho^a (1 + 0.1 s)`` and ``|p_s| = rho``.  ``points`` are
    multiprecision 3-vectors.  ``cross_bounds`` records the observed range of
    ``|<p_s, b_k>| / rho`` over ``s != k``.
    """

    rho: float
    delta: GammaVector
    b_list: list
    b_coeffs: list
    points: list
    alpha: Fraction = ALPHA
    alpha1: Fraction = ALPHA1
    a_exp: Fraction = A_EXP
    cross_bounds: tuple = (0.0, 0.0)

    @property
    def m(self) -> int:
        return len(self.b_list)

    @classmethod
    def build(cls, delta: GammaVector, rho: float, m: int | None = None) -> "ExtractionGeometry":
        dirs = projection_directions(delta)
        if m is not None:
            if not 1 <= m <= len(dirs):
                raise ValueError(f"m must be in 1..{len(dirs)}")
            dirs = dirs[:m]
        b_list = [b for b, _, _ in dirs]
        with mpmath.workdps(DPS):
            rho_mp = mpmath.mpf(rho)
            ra = rho_mp ** (mpmath.mpf(A_EXP.numerator) / A_EXP.denominator)
            dn = delta.cart / delta.norm
            points = [_balanced_point(dn, b_list, rho_mp)]
            for s, b in enumerate(b_list, start=1):
                bn = np.linalg.norm(b)
                e = [mpmath.mpf(x) / bn for x in b]
                nvec = np.cross(dn, b / bn)
                x = ra * (1 + mpmath.mpf(s) / 10) / bn
                y = mpmath.sqrt(rho_mp**2 - x**2)
                points.append([x * e[i] + y * mpmath.mpf(nvec[i]) for i in range(3)])
            ratios = [
                float(abs(_dot(points[s], b_list[k - 1])) / rho_mp)
                for s in range(len(points))
                for k in range(1, len(b_list) + 1)
                if s != k
            ]
        return cls(
            rho=float(rho),
            delta=delta,
            b_list=b_list,
            b_coeffs=[c for _, c, _ in dirs],
            points=points,
            cross_bounds=(min(ratios), max(ratios)) if ratios else (0.0, 0.0),
        )

    def coefficient_matrix(self) -> mpmath.matrix:
        """Rows ``[1, |b_k|^4 / (4 <p_s, b_k>^2)]`` for ``s = 0..m``."""
        m = self.m
        A = mpmath.matrix(m + 1, m + 1)
        for s, p in enumerate(self.points):
            A[s, 0] = 1
            for k, b in enumerate(self.b_list, start=1):
                b4 = _dot(b, b) ** 2
                A[s, k] = b4 / (4 * _dot(p, b) ** 2)
        return A

    def sq_norms(self) -> list:
        return [_dot(p, p) for p in self.points]


def _balanced_point(dn, b_list, rho):
    """``rho`` times the unit vector in the plane maximising ``min_k |cos(p, b_k)|``."""
    e1 = b_list[0] / np.linalg.norm(b_list[0])
    e2 = np.cross(dn, e1)
    theta = np.linspace(0.0, np.pi, 3601)
    dirs = np.outer(np.cos(theta), e1) + np.outer(np.sin(theta), e2)
    units = np.array([b / np.linalg.norm(b) for b in b_list])
    score = np.min(np.abs(dirs @ units.T), axis=1)
    t = theta[int(np.argmax(score))]
    return [rho * (mpmath.cos(t) * e1[i] + mpmath.sin(t) * e2[i]) for i in range(3)]


# -- ground truth from the Hill problem -------------------------------------


def density_coefficients(vec: np.ndarray) -> dict:
    """Fourier coefficients ``R_p`` of ``|phi|^2`` from eigenvector entries ``c_n``.

    ``|phi(s)|^2 = sum_p R_p e^{ips}`` with ``R_p = sum_n c_{n+p} conj(c_n)``.
    """
    N = vec.size
    return {p: complex(np.vdot(vec[: N - p], vec[p:])) if p >= 0 else complex(np.vdot(vec[-p:], vec[: N + p]))
            for p in range(-(N - 1), N)}


def J_fourier(q: PotentialCoefficients, delta: GammaVector, b_mode: GammaVector, R: dict) -> float:
    """``int |q_{delta,b}|^2 |phi|^2`` by Parseval, ``|phi|^2 = sum R_p e^{ip<delta,x>}``."""
    geo = _geometry(q.basis, delta.coeffs, b_mode.coeffs)
    modes = geo.modes
    acc = 0j
    for c in modes:
        wc = c.cart / (c.cart @ geo.beta)
        for c2 in modes:
            d = np.subtract(c2.coeffs, c.coeffs)
            # c2 - c must be a multiple p * delta
            p = _multiple_of(d, delta.coeffs)
            if p is None or p not in R:
                continue
            w2 = c2.cart / (c2.cart @ geo.beta)
            acc += (wc @ w2) * q(c) * np.conj(q(c2)) * R[p]
    return float(acc.real)


def _multiple_of(d, base):
    base = np.asarray(base)
    i = int(np.flatnonzero(base)[0])
    if d[i] % base[i]:
        return None
    p = int(d[i] // base[i])
    return p if np.array_equal(d, p * base) else None


def J_quadrature(q: PotentialCoefficients, delta: GammaVector, b_mode: GammaVector, weight, n: int = DEFAULT_GRID) -> float:
    """``int |q_{delta,b}|^2 W(<delta, x>)`` on the cell grid for a profile ``W(s)``."""
    R, S = mode_fields(q, n)
    geo = _geometry(q.basis, delta.coeffs, b_mode.coeffs)
    modes, w = plane_weights(geo)
    u = _cell_phase(delta, n)
    F = np.ascontiguousarray(weight(u), dtype=float)
    return float(kernels.plane_mean(R, S, modes, w, 0, 0, F))


def _cell_phase(delta: GammaVector, n: int) -> np.ndarray:
    return 2 * np.pi * (cell_coordinates(n) @ np.asarray(delta.coeffs, dtype=float))


def hill_problem(q: PotentialCoefficients, delta: GammaVector, v: float, truncation: int) -> HillProblem:
    return HillProblem.from_potential(q, delta, v, truncation)


def hill_truth(q: PotentialCoefficients, delta: GammaVector, b_modes, j: int, v: float, truncation: int | None = None):
    """``(mu_j, [J(delta, b_k, j, v)])`` from the truncated Hill eigenpair."""
    if truncation is None:
        truncation = max(40, 2 * abs(j) + 20)
    prob = hill_problem(q, delta, v, truncation)
    mu, vec = level(prob, j, vectors=True)
    R = density_coefficients(vec)
    return mu, [J_fourier(q, delta, b, R) for b in b_modes]


# -- synthetic data and the (m+1) x (m+1) system ------------------------------


@dataclass
class SyntheticBandData:
    geometry: ExtractionGeometry
    Lambda: dict
    v: float
    noise_amp: float
    _truth: dict = field(default_factory=dict, repr=False)

    def truth(self, j):
        return self._truth[j]


def noise_bound(rho, amp: float = 1.0):
    with mpmath.workdps(DPS):
        r = mpmath.mpf(rho)
        return amp * r ** mpmath.mpf(MU_EXPONENT) * mpmath.log(r)


def generate_synthetic(
    q: PotentialCoefficients,
    geometry: ExtractionGeometry,
    j_list,
    v: float,
    noise_amp: float,
    seed: int,
    truncation: int | None = None,
) -> SyntheticBandData:
    """Band samples ``Lambda(j, s)`` from the asymptotic model plus bounded noise."""
    rng = np.random.default_rng(seed)
    truth = {}
    Lam = {}
    with mpmath.workdps(DPS):
        A = geometry.coefficient_matrix()
        norms = geometry.sq_norms()
        bound = noise_bound(geometry.rho, noise_amp)
        for j in j_list:
            mu, J = hill_truth(q, geometry.delta, geometry.b_coeffs, j, v, truncation)
            truth[j] = (mu, J)
            for s in range(geometry.m + 1):
                val = norms[s] + mpmath.mpf(mu)
                for k in range(geometry.m):
                    val += A[s, k + 1] * mpmath.mpf(J[k])
                Lam[(j, s)] = val + bound * mpmath.mpf(rng.uniform(-1.0, 1.0))
    return SyntheticBandData(geometry, Lam, v, noise_amp, truth)


@dataclass
class MuJEstimate:
    mu: mpmath.mpf
    J: list
    det: mpmath.mpf


def solve_mu_J(data: SyntheticBandData, j: int) -> MuJEstimate:
    """Solve the (m+1)-point system for ``mu_j`` and ``J(delta, b_k, j, v)`` by Cramer's rule.

    Raises
    ------
    IllConditioned
        If the determinant falls below 1e-3 of its leading-order size, the
        product of the diagonal entries.
    """
    geo = data.geometry
    with mpmath.workdps(DPS):
        A = geo.coefficient_matrix()
        norms = geo.sq_norms()
        rhs = mpmath.matrix([data.Lambda[(j, s)] - norms[s] for s in range(geo.m + 1)])
        det = mpmath.det(A)
        lead = mpmath.fprod(A[k, k] for k in range(1, geo.m + 1))
        if abs(det) < mpmath.mpf("1e-3") * abs(lead):
            raise IllConditioned(f"determinant {mpmath.nstr(det, 5)} vs leading order {mpmath.nstr(lead, 5)}")
        sol = []
        for col in range(geo.m + 1):
            Ac = A.copy()
            for s in range(geo.m + 1):
                Ac[s, col] = rhs[s]
            sol.append(mpmath.det(Ac) / det)
    return MuJEstimate(mu=sol[0], J=sol[1:], det=det)


# -- Vandermonde systems in 1/(jk) -------------------------------------------


def _scaled_vandermonde(samples: dict, j: int, powers, cap: int, what: str):
    """Solve ``sum_i x_i k^{-i} = y_k`` for the given powers; return ``x_i j^{-i}``-unscaled values."""
    ks = sorted(samples)
    n = len(powers)
    if n > cap:
        raise IllConditioned(f"{what}: n = {n} exceeds the cap {cap}")
    if len(ks) < n:
        raise ValueError(f"{what}: need {n} samples, got {len(ks)}")
    ks = ks[:n]
    with mpmath.workdps(DPS):
        V = mpmath.matrix(n, n)
        for r, k in enumerate(ks):
            for c, i in enumerate(powers):
                V[r, c] = mpmath.mpf(k) ** (-i)
        y = mpmath.matrix([mpmath.mpf(samples[k]) for k in ks])
        x = mpmath.lu_solve(V, y)
        # column scaling: unknown c_i = x_i * j^i
        return [x[c] * mpmath.mpf(j) ** i for c, i in enumerate(powers)]


def solve_c_expansion(mu_samples: dict, j: int, n: int, delta_norm: float = 1.0, v: float = 0.0) -> list:
    """Coefficients ``c_1..c_n`` of ``mu_{jk} - |delta|^2 (jk + v)^2 = sum_i c_i (jk)^{-i}``.

    ``mu_samples`` maps ``k -> mu_{jk}`` for ``k = 1..n``.
    """
    with mpmath.workdps(DPS):
        resid = {
            k: mpmath.mpf(val) - mpmath.mpf(delta_norm) ** 2 * (j * k + mpmath.mpf(v)) ** 2
            for k, val in mu_samples.items()
        }
        return _scaled_vandermonde(resid, j, list(range(1, n + 1)), C_CAP, "c-expansion")


def solve_J_expansion(J_samples: dict, j: int, n: int) -> list:
    """``J_0..J_n`` of ``J(jk) = sum_i J_i (jk)^{-i}`` from ``k = 1..n+1``."""
    return _scaled_vandermonde(J_samples, j, list(range(0, n + 1)), J_CAP + 1, "J-expansion")


def c3_to_mass(c3, delta_norm: float) -> float:
    """``int_0^{2 pi} |Q|^2 dt = 16 pi |delta|^3 c_3``."""
    return float(16 * np.pi * delta_norm**3 * c3)


def c3_to_invariant_I(c3, delta_norm: float) -> float:
    """``I(delta) = (1/2pi) int |Q|^2 = 8 |delta|^3 c_3``."""
    return float(8 * delta_norm**3 * c3)


@dataclass(frozen=True)
class ModeConstants:
    """The six constants of the ``|phi|^2`` expansion, supplied by configuration."""

    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    a6: float

    @classmethod
    def parse(cls, text: str) -> "ModeConstants":
        vals = [float(x) for x in text.replace(",", " ").split()]
        if len(vals) != 6:
            raise ValueError(f"expected six constants, got {len(vals)}")
        return cls(*vals)


def J_to_invariants(J: list, z_delta_sq: float, const: ModeConstants) -> tuple[float, float]:
    """Map ``(J_0, J_2, J_4)`` to ``(I1, I2)``.

    ``J_2 = I1 / 2 + a1 |z|^2 J_0`` and ``J_4 = a4 I1 + a5 I2 + a6 J_0``.
    """
    J0, J2, J4 = float(J[0]), float(J[2]), float(J[4])
    I1 = 2.0 * (J2 - const.a1 * z_delta_sq * J0)
    if const.a5 == 0:
        raise ValueError("a5 must be nonzero to recover I2")
    I2 = (J4 - const.a4 * I1 - const.a6 * J0) / const.a5
    return I1, I2


# -- rho sweep ---------------------------------------------------------------


@dataclass
class SweepReport:
    """Median recovery errors per ``rho`` and their log-log slopes."""

    rows: list
    slope_mu: float
    slope_J: float
    slope_det: float
    expected_mu: float = MU_EXPONENT
    expected_J: float = J_EXPONENT
    expected_det: float = 0.0


def _slope(x, y) -> float:
    if np.any(np.asarray(y) <= 0):
        return float("nan")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def rho_sweep(
    q: PotentialCoefficients,
    delta: GammaVector,
    rhos,
    m: int = 2,
    j: int = 3,
    v: float = 0.3,
    noise_amp: float = 1.0,
    seeds=range(16),
) -> SweepReport:
    """Recovery error of ``mu_j`` and ``J`` at each ``rho``, median over seeds."""
    rows = []
    truth = None
    for rho in rhos:
        geo = ExtractionGeometry.build(delta, rho, m)
        mu_err, J_err, det = [], [], None
        for seed in seeds:
            data = generate_synthetic(q, geo, [j], v, noise_amp, seed)
            if truth is None:
                truth = data.truth(j)
            est = solve_mu_J(data, j)
            mu_true, J_true = truth
            mu_err.append(float(abs(est.mu - mu_true)))
            J_err.append(max(float(abs(e - t)) for e, t in zip(est.J, J_true)))
            det = float(abs(est.det))
        rows.append((float(rho), float(np.median(mu_err)), float(np.median(J_err)), det))
    r = np.array(rows)
    return SweepReport(
        rows=rows,
        slope_mu=_slope(r[:, 0], r[:, 1]),
        slope_J=_slope(r[:, 0], r[:, 2]),
        slope_det=_slope(r[:, 0], r[:, 3]),
        expected_det=float(-2 * m * A_EXP),
    )
