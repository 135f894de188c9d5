import mpmath
import numpy as np
import pytest

from invrec.errors import IllConditioned
from invrec.extraction import (
    A_EXP,
    DPS,
    ExtractionGeometry,
    ModeConstants,
    J_fourier,
    J_quadrature,
    J_to_invariants,
    c3_to_invariant_I,
    c3_to_mass,
    density_coefficients,
    generate_synthetic,
    hill_problem,
    hill_truth,
    projection_directions,
    solve_c_expansion,
    solve_J_expansion,
    solve_mu_J,
)
from invrec.hill import level
from invrec.invariants import invariant_I, invariant_I1_sum


@pytest.fixture
def delta(basis):
    return basis.gamma(1)


def _f(x):
    return float(x)


def test_projection_directions(delta):
    dirs = projection_directions(delta)
    assert len(dirs) == 4
    for beta, c, modes in dirs:
        assert abs(beta @ delta.cart) < 1e-9 * np.linalg.norm(beta) * delta.norm
        assert c.coeffs in {m.coeffs for m in modes}


def test_geometry_layout(delta):
    rho = 1e4
    geo = ExtractionGeometry.build(delta, rho, 2)
    ra = rho ** float(A_EXP)
    with mpmath.workdps(DPS):
        for s, p in enumerate(geo.points):
            assert _f(mpmath.sqrt(sum(x * x for x in p))) == pytest.approx(rho, rel=1e-12)
            assert abs(_f(sum(x * d for x, d in zip(p, delta.cart)))) < 1e-9 * rho
            if s:
                b = geo.b_list[s - 1]
                assert _f(sum(x * y for x, y in zip(p, b))) == pytest.approx(ra * (1 + 0.1 * s), rel=1e-12)
    assert geo.m == 2
    with pytest.raises(ValueError):
        ExtractionGeometry.build(delta, rho, 9)


def test_model_identity_single_direction(q, delta):
    geo = ExtractionGeometry.build(delta, 1e3, 1)
    data = generate_synthetic(q, geo, [3], 0.3, 0.0, 0)
    mu, J = data.truth(3)
    with mpmath.workdps(DPS):
        p, b = geo.points[1], geo.b_list[0]
        pb = sum(x * y for x, y in zip(p, b))
        b2 = sum(mpmath.mpf(x) ** 2 for x in b)
        lhs = data.Lambda[(3, 1)] - sum(x * x for x in p) - mpmath.mpf(mu)
        rhs = b2**2 / (4 * pb**2) * mpmath.mpf(J[0])
        assert abs(lhs - rhs) <= mpmath.mpf(10) ** -40 * abs(rhs)


def test_synthetic_reproducible(q, delta):
    geo = ExtractionGeometry.build(delta, 1e3, 2)
    a = generate_synthetic(q, geo, [3], 0.3, 1.0, 5)
    b = generate_synthetic(q, geo, [3], 0.3, 1.0, 5)
    c = generate_synthetic(q, geo, [3], 0.3, 1.0, 6)
    assert a.Lambda == b.Lambda
    assert a.Lambda != c.Lambda


def test_J_fourier_matches_quadrature(q, delta):
    j, v = 3, 0.3
    prob = hill_problem(q, delta, v, 40)
    _, vec = level(prob, j, vectors=True)
    R = density_coefficients(vec)

    def density(u):
        return sum((R[p] * np.exp(1j * p * u)).real for p in range(-12, 13))

    assert abs(R[0] - 1) < 1e-12
    for _, c, _ in projection_directions(delta):
        assert J_fourier(q, delta, c, R) == pytest.approx(J_quadrature(q, delta, c, density, n=32), rel=1e-10)


def test_zero_noise_exact(q, delta):
    for m in (1, 2):
        geo = ExtractionGeometry.build(delta, 1e4, m)
        data = generate_synthetic(q, geo, [3], 0.3, 0.0, 0)
        est = solve_mu_J(data, 3)
        mu, J = data.truth(3)
        assert abs(_f(est.mu) - mu) <= 1e-9 * abs(mu)
        for e, t in zip(est.J, J):
            assert abs(_f(e) - t) <= 1e-9 * abs(t)


def test_ill_conditioned(q, delta):
    geo = ExtractionGeometry.build(delta, 1e3, 2)
    geo.points[2] = list(geo.points[1])
    data = generate_synthetic(q, geo, [3], 0.3, 0.0, 0)
    with pytest.raises(IllConditioned):
        solve_mu_J(data, 3)


def _mu_profile(c, j, n_samples, delta_norm=1.0, v=0.0):
    with mpmath.workdps(DPS):
        return {
            k: mpmath.mpf(delta_norm) ** 2 * (j * k + mpmath.mpf(v)) ** 2
            + sum(mpmath.mpf(ci) * mpmath.mpf(j * k) ** -(i + 1) for i, ci in enumerate(c))
            for k in range(1, n_samples + 1)
        }


def test_c_expansion_unit_profile():
    c = solve_c_expansion(_mu_profile([0, 0, 1, 0], 10, 4), 10, 4)
    np.testing.assert_allclose([_f(x) for x in c], [0, 0, 1, 0], atol=1e-8)


def test_c_expansion_general_profile():
    want = [0.3, -0.2, 0.0625, 0.01, -0.004, 0.002]
    c = solve_c_expansion(_mu_profile(want, 7, 6, 1.4, 0.3), 7, 6, 1.4, 0.3)
    np.testing.assert_allclose([_f(x) for x in c], want, atol=1e-8)


def test_c_expansion_cap():
    with pytest.raises(IllConditioned):
        solve_c_expansion(_mu_profile([0] * 7, 5, 7), 5, 7)
    with pytest.raises(ValueError):
        solve_c_expansion(_mu_profile([0] * 3, 5, 3), 5, 4)


def test_c_expansion_noise_bound():
    j, n = 10, 4
    with mpmath.workdps(DPS):
        V = mpmath.matrix([[mpmath.mpf(k) ** -i for i in range(1, n + 1)] for k in range(1, n + 1)])
        K = float(mpmath.norm(mpmath.inverse(V)[2, :], 1))
    base = _mu_profile([0.1, 0.05, 0.0625, 0.0], j, n)
    rng = np.random.default_rng(0)
    for eta in (1e-6, 1e-9, 1e-12):
        noisy = {k: v + eta * rng.uniform(-1, 1) for k, v in base.items()}
        c3 = _f(solve_c_expansion(noisy, j, n)[2])
        assert abs(c3 - 0.0625) <= K * eta * j**3


def test_c3_cosine_analytic():
    # (1/16 pi) int_0^{2 pi} (2 mu cos s)^2 ds = mu^2 / 4
    mu = 0.37
    c3 = mpmath.quad(lambda s: (2 * mu * mpmath.cos(s)) ** 2, [0, 2 * mpmath.pi]) / (16 * mpmath.pi)
    assert _f(c3) == pytest.approx(mu**2 / 4, rel=1e-14)
    assert c3_to_mass(mu**2 / 4, 1.0) == pytest.approx(4 * np.pi * mu**2, rel=1e-14)
    # I(delta) = 2 |z|^2 with z = mu
    assert c3_to_invariant_I(mu**2 / 4, 1.0) == pytest.approx(2 * mu**2, rel=1e-14)


def test_J_expansion_exact():
    want = [1.5, -0.3, 0.8, 0.1, -0.05]
    j = 6
    with mpmath.workdps(DPS):
        samples = {
            k: sum(mpmath.mpf(w) * mpmath.mpf(j * k) ** -i for i, w in enumerate(want)) for k in range(1, 6)
        }
    got = solve_J_expansion(samples, j, 4)
    np.testing.assert_allclose([_f(x) for x in got], want, atol=1e-8)


def test_J0_is_plane_mass(q, delta):
    b = projection_directions(delta)[0][1]
    mass = J_quadrature(q, delta, b, lambda u: np.ones_like(u), n=24)
    _, J = hill_truth(q, delta, [b], 40, 0.3, truncation=120)
    assert J[0] == pytest.approx(mass, rel=1e-4)


def test_J2_half_I1(q, delta):
    # with a1 = 0 the j^-2 weight is Q^delta / 2, so J_2 = I1(delta, b) / 2
    z = q(delta)
    for _, c, _ in projection_directions(delta):
        J2 = J_quadrature(q, delta, c, lambda u: (z * np.exp(1j * u)).real, n=24)
        assert J2 == pytest.approx(0.5 * invariant_I1_sum(q, delta, c), rel=1e-10)


def test_J_to_invariants_round_trip():
    const = ModeConstants.parse("0.25, 0, 0, 0.5, -1.5, 0.1")
    J0, I1, I2, zsq = 2.0, -0.7, 1.3, 0.9
    J2 = I1 / 2 + const.a1 * zsq * J0
    J4 = const.a4 * I1 + const.a5 * I2 + const.a6 * J0
    got = J_to_invariants([J0, 0.0, J2, 0.0, J4], zsq, const)
    assert got == pytest.approx((I1, I2), rel=1e-14)
    with pytest.raises(ValueError):
        ModeConstants.parse("1 2 3")
    with pytest.raises(ValueError):
        J_to_invariants([1, 0, 1, 0, 1], 1.0, ModeConstants(0, 0, 0, 1, 0, 0))


def test_I_from_directional_mass(q, delta):
    # the Hill directional potential carries the same L2 mass as I(delta)
    prob = hill_problem(q, delta, 0.3, 40)
    mass = sum(abs(c) ** 2 for c in prob.coefficients.values())
    assert mass == pytest.approx(invariant_I(q, 1), rel=1e-14)
