import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invrec.errors import GapUnderflow, InterlacingViolation, TruncationTooSmall
from invrec.hill import (
    GapReport,
    HillProblem,
    c3_probe,
    check_interlacing,
    checked_gaps,
    first_underflow,
    free_level,
    gap_decay_compare,
    gap_lengths,
    level,
    second_order_shift,
    spectrum,
)

# Mathieu characteristic values at q = 1 (standard tables)
A0, B1, A1, B2, A2 = -0.4551386041, -0.110248816, 1.859108072, 3.917024773, 4.371300982


def test_free_case_exact():
    p = HillProblem(1.3, {}, 0.3, 40)
    ev = spectrum(p).eigenvalues
    want = np.sort(1.3**2 * (p.indices() + 0.3) ** 2)
    np.testing.assert_allclose(ev, want, atol=1e-12)


def test_matrix_hermitian():
    p = HillProblem(1.0, {1: 0.3 + 0.2j, 2: -0.1j}, 0.25, 30)
    M = p.matrix()
    assert np.max(np.abs(M - M.conj().T)) == 0.0


def test_hermitian_fill_and_validation():
    p = HillProblem(1.0, {2: 1 + 1j}, 0.0, 20)
    assert p.coefficients[-2] == 1 - 1j
    assert p.max_frequency == 2
    with pytest.raises(ValueError):
        HillProblem(0.0, {}, 0.1, 20)
    with pytest.raises(ValueError):
        HillProblem(1.0, {}, 1.0, 20)


def test_truncation_too_small():
    with pytest.raises(TruncationTooSmall):
        HillProblem(1.0, {5: 1.0}, 0.1, 12).matrix()
    with pytest.raises(TruncationTooSmall):
        level(HillProblem(1.0, {1: 0.1}, 0.1, 15), 10)


def test_self_convergence():
    coeffs = {1: 0.4 + 0.1j, 2: 0.2}
    a = spectrum(HillProblem(1.0, coeffs, 0.3, 40)).eigenvalues[:10]
    b = spectrum(HillProblem(1.0, coeffs, 0.3, 80)).eigenvalues[:10]
    assert np.max(np.abs(a - b)) <= 1e-10


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_second_order_perturbation(n):
    mu = 0.01
    p = HillProblem(1.0, {1: mu}, 0.3, 40)
    shift = level(p, n) - free_level(p, n)
    assert abs(shift - second_order_shift(mu, n, 0.3)) <= 5 * mu**4


def test_perturbation_richardson():
    # halving mu should cut the deviation from the second-order formula by ~16
    n, v = 3, 0.3
    d = []
    for mu in (0.2, 0.1):
        p = HillProblem(1.0, {1: mu}, v, 40)
        d.append(abs(level(p, n) - free_level(p, n) - second_order_shift(mu, n, v)))
    assert 12 < d[0] / d[1] < 20


def test_level_vector_normalized():
    p = HillProblem(1.0, {1: 0.2}, 0.3, 30)
    lam, vec = level(p, 2, vectors=True)
    assert np.linalg.norm(vec) == pytest.approx(1.0)
    np.testing.assert_allclose(p.matrix() @ vec, lam * vec, atol=1e-12)


def test_mathieu_table():
    r = gap_lengths({1: 1.0}, 2)
    assert r.lambda0 == pytest.approx(A0, abs=1e-8)
    assert (r.lam1[0], r.lam2[0]) == pytest.approx((B1, A1), abs=1e-8)
    assert (r.lam1[1], r.lam2[1]) == pytest.approx((B2, A2), abs=1e-8)


def test_zero_potential_gaps():
    r = gap_lengths({}, 8)
    np.testing.assert_allclose(r.gaps, 0.0, atol=1e-12)
    np.testing.assert_allclose(r.lam1, np.arange(1, 9) ** 2, atol=1e-12)


def test_first_gap_limit():
    ratios = [gap_lengths({1: mu}, 1).gaps[0] / mu for mu in (1e-1, 1e-2, 1e-3)]
    assert abs(ratios[-1] - 2) < 0.02 * 2
    assert abs(ratios[2] - 2) < abs(ratios[0] - 2)


def test_first_gap_linear_in_scale():
    g1 = gap_lengths({1: 1e-3}, 1).gaps[0]
    g2 = gap_lengths({1: 2e-3}, 1).gaps[0]
    assert g2 / g1 == pytest.approx(2.0, rel=1e-3)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.01, 2.0), st.floats(-1.0, 1.0), st.floats(-1.0, 1.0))
def test_interlacing_random(a, b, c):
    r = gap_lengths({1: a, 2: complex(b, c)}, 10)
    assert np.all(r.gaps >= 0)
    check_interlacing(r)


def test_interlacing_violation_detected():
    bad = GapReport(0.0, np.array([1, 2]), np.array([1.0, 0.5]), np.array([2.0, 3.0]), np.array([1.0, 2.5]))
    with pytest.raises(InterlacingViolation):
        check_interlacing(bad)


def test_gap_precision_paths_agree():
    a = gap_lengths({1: 0.5}, 6)
    b = gap_lengths({1: 0.5}, 6, dps=30)
    np.testing.assert_allclose(a.gaps, b.gaps, atol=10 * a.resolution)
    assert b.resolution < a.resolution


def test_underflow():
    assert first_underflow([1.0, 1e-3, 1e-20, 1e-5]) == 2
    assert first_underflow([1.0]) is None
    with pytest.raises(GapUnderflow):
        checked_gaps({1: 0.01}, 12)


def test_decay_ordering():
    rep = gap_decay_compare({2: 1.0}, {1: 1.0}, range(8, 13))
    assert rep.compared == [8, 10, 12]
    assert rep.ordering_holds


def test_decay_identical_inputs():
    a = gap_decay_compare({1: 1.0}, {1: 1.0}, range(2, 7), dps=None)
    np.testing.assert_array_equal(a.gaps_high, a.gaps_low)


def test_c3_probe_zero_potential():
    rep = c3_probe(HillProblem(1.0, {}, 0.3, 60), range(10, 40))
    np.testing.assert_allclose(rep.coefficients, 0.0, atol=1e-10)


def test_c3_probe_cosine():
    rep = c3_probe(HillProblem(1.0, {1: 0.5}, 0.3, 60), range(10, 40))
    assert rep.c3_mass == pytest.approx(0.0625)
    assert rep.c2_perturbative == pytest.approx(0.125)
    # the fitted j^-2 term follows second-order perturbation theory, not zero
    assert rep.coefficients[1] == pytest.approx(rep.c2_perturbative, rel=1e-2)
    assert rep.fit_residual < 1e-8
