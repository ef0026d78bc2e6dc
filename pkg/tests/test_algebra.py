import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebe.algebra import (E12, E21, IDENTITY, DTriple, HermMetric, Mat2,
                         SingularGauge, cholesky_like_factor, dagger,
                         gauge_conjugate_triple, herm_adjoint, hermitize,
                         inv2, is_antihermitian, is_hermitian, is_traceless)

finite = st.floats(-3.0, 3.0, allow_nan=False)


def mat_strategy():
    return st.tuples(*[st.tuples(finite, finite) for _ in range(4)]).map(
        lambda t: np.array([[complex(*t[0]), complex(*t[1])],
                            [complex(*t[2]), complex(*t[3])]]))


def metric_strategy():
    # A^dag A + delta is hermitian positive definite for any A
    return mat_strategy().map(
        lambda a: HermMetric(dagger(a) @ a + 0.5 * IDENTITY))


def test_mat2_rejects_nonfinite():
    with pytest.raises(ValueError):
        Mat2(np.array([[np.nan, 0], [0, 1]], dtype=complex))


def test_predicates():
    assert Mat2(E12 - E21).is_antihermitian()
    assert Mat2(E12 + E21).is_hermitian()
    assert Mat2(np.diag([1.0, -1.0]).astype(complex)).is_traceless()
    assert not Mat2(IDENTITY).is_traceless()


def test_herm_metric_normalizes():
    h = HermMetric(np.array([[4.0, 0], [0, 1.0]], dtype=complex))
    assert abs(np.linalg.det(h.h) - 1.0) < 1e-12
    assert np.allclose(h.h, dagger(h.h))
    with pytest.raises(ValueError):
        HermMetric(np.array([[1.0, 0], [0, -1.0]], dtype=complex))


def test_herm_adjoint_identity_metric():
    h = HermMetric()
    assert np.allclose(herm_adjoint(E21, h), E12)
    assert np.allclose(herm_adjoint(np.diag([1j, -1j]), h), np.diag([-1j, 1j]))


def test_herm_adjoint_diagonal_metric():
    # [[0, f], [0, 0]] against diag(e^-u, e^u) picks up e^-2u on the flip side
    u, f = 0.7, 1.5 - 0.25j
    h = HermMetric(np.diag([np.exp(-u), np.exp(u)]).astype(complex))
    got = herm_adjoint(f * E12, h)
    want = np.conj(f) * np.exp(-2 * u) * E21
    assert np.max(np.abs(got - want)) < 1e-12


@given(m=mat_strategy(), h=metric_strategy())
def test_herm_adjoint_involutive(m, h):
    twice = herm_adjoint(herm_adjoint(m, h), h)
    assert np.max(np.abs(twice - m)) < 1e-10


@given(m=mat_strategy(), n=mat_strategy(), h=metric_strategy())
def test_herm_adjoint_reverses_products(m, n, h):
    lhs = herm_adjoint(m @ n, h)
    rhs = herm_adjoint(n, h) @ herm_adjoint(m, h)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


@given(m=mat_strategy(), h=metric_strategy(), a=finite, b=finite)
def test_herm_adjoint_antilinear(m, h, a, b):
    c = complex(a, b)
    lhs = herm_adjoint(c * m, h)
    rhs = np.conj(c) * herm_adjoint(m, h)
    assert np.max(np.abs(lhs - rhs)) < 1e-9


@given(m=mat_strategy(), h=metric_strategy())
def test_herm_adjoint_preserves_tracelessness(m, h):
    m = m - 0.5 * np.trace(m) * IDENTITY
    assert is_traceless(herm_adjoint(m, h), tol=1e-10)


def test_factor_identity_and_diagonal():
    assert np.allclose(cholesky_like_factor(IDENTITY), IDENTITY)
    u = 0.9
    h = np.diag([np.exp(-u), np.exp(u)]).astype(complex)
    g = cholesky_like_factor(h)
    assert np.allclose(g, np.diag([np.exp(-u / 2), np.exp(u / 2)]))


@given(h=metric_strategy())
def test_factor_squares_to_metric(h):
    g = cholesky_like_factor(h)
    assert np.max(np.abs(dagger(g) @ g - h.h)) < 1e-10
    assert is_hermitian(g, tol=1e-10)


def _const_triple(phi):
    zero = np.zeros((2, 2), dtype=complex)
    return DTriple(a1=zero, phi=phi, a3=zero, metric=IDENTITY.copy())


def test_gauge_identity_fixes_data():
    data = _const_triple(1.3 * E12)
    out = gauge_conjugate_triple(IDENTITY, data)
    assert np.allclose(out.phi, data.phi)
    assert np.allclose(out.a1, data.a1)
    assert np.allclose(out.metric, data.metric)


def test_gauge_constant_diagonal_scales_upper_slot():
    a = 2.0
    g = np.diag([a, 1 / a]).astype(complex)
    f = 0.7 + 0.2j
    out = gauge_conjugate_triple(g, _const_triple(f * E12))
    assert np.allclose(out.phi, (f / a ** 2) * E12)


def test_gauge_phase_absorption():
    # theta-dependent diagonal gauge removes the phase of z^k: conjugating
    # z^k e12 by diag(e^{ik t/2}, e^{-ik t/2}) leaves the k=0 profile r^k e12
    k = 3
    theta = np.linspace(0.0, 2 * np.pi, 17)[:-1]
    r = 1.7
    z = r * np.exp(1j * theta)
    g = np.zeros((theta.size, 2, 2), dtype=complex)
    g[:, 0, 0] = np.exp(1j * k * theta / 2)
    g[:, 1, 1] = np.exp(-1j * k * theta / 2)
    phi = (z ** k)[:, None, None] * E12
    out = gauge_conjugate_triple(g, DTriple(a1=np.zeros_like(phi), phi=phi,
                                            a3=np.zeros_like(phi)))
    want = (r ** k) * E12
    assert np.max(np.abs(out.phi - want)) < 1e-12


def test_gauge_composition_law():
    rng = np.random.default_rng(7)
    g1 = IDENTITY + 0.3 * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    g2 = IDENTITY + 0.3 * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    data = DTriple(a1=rng.standard_normal((2, 2)) + 0j,
                   phi=rng.standard_normal((2, 2)) + 0j,
                   a3=rng.standard_normal((2, 2)) + 0j,
                   metric=(dagger(g1) @ g1 + IDENTITY))
    once = gauge_conjugate_triple(g2, gauge_conjugate_triple(g1, data))
    both = gauge_conjugate_triple(g1 @ g2, data)
    for slot in ("a1", "phi", "a3", "metric"):
        assert np.max(np.abs(getattr(once, slot) - getattr(both, slot))) < 1e-10


def test_singular_gauge_raises():
    g = np.array([[1.0, 0.0], [0.0, 1e-12]], dtype=complex)
    with pytest.raises(SingularGauge):
        gauge_conjugate_triple(g, _const_triple(E12))


def test_hermitize_is_exact():
    m = np.array([[1 + 1j, 2 - 1j], [0.5j, 3 + 2j]])
    h = hermitize(m)
    assert np.array_equal(h, dagger(h))
