import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from superpose import DomainError
from superpose.bernoulli_bounds import ETA, assemble_A, proof_matrix_B, proof_matrix_Btilde
from superpose.quadrature import (
    GaussianBump,
    Lattice,
    PolynomialFn,
    bernoulli_polynomial,
    discretized_gauss_1d,
    discretized_gauss_2d,
    discretized_gauss_3d,
    em_bound_constant_check,
    em_classical_rhs_m0,
    extended_em_identity,
    normalized_margin,
    trapezoid_gap,
)


def lattice_sum_1d(n, s, mu=0.0):
    h = 2 / math.sqrt(n)
    return h * sum(math.exp(-0.5 * s * s * (h * (k - n / 2) - mu) ** 2) for k in range(n + 1))


def inner_trapezoid(A, fixed):
    """Integral over the last coordinate by a wide, fine trapezoid rule (spectrally accurate for Gaussians)."""
    k = A.shape[0] - 1
    u = np.linspace(-60, 60, 240_001)
    pts = np.concatenate([np.broadcast_to(fixed, (u.size, k)), u[:, None]], axis=1)
    q = np.einsum("ij,jk,ik->i", pts, A, pts)
    return float(trapezoid(np.exp(-0.5 * q), u))


@given(st.integers(1, 400))
def test_lattice_points(n):
    lat = Lattice(n)
    pts = lat.points
    assert pts.size == n + 1
    assert np.allclose(pts, -pts[::-1], atol=1e-12)
    assert np.allclose(np.diff(pts), lat.h)


def test_lattice_rejects_zero():
    with pytest.raises(DomainError):
        Lattice(0)


def test_1d_hand_sum():
    res = discretized_gauss_1d(4, 0.0, 1.0)
    assert res.I_d == pytest.approx(1 + 2 * math.exp(-0.5) + 2 * math.exp(-2), rel=1e-14)
    assert res.I_c == pytest.approx(math.sqrt(2 * math.pi), rel=1e-15)
    assert res.bound == pytest.approx(2.7341, abs=1e-4)
    assert res.bound_ok


@pytest.mark.parametrize("n", [4, 16, 64, 256, 1024])
def test_1d_off_lattice_shift(n):
    h = 2 / math.sqrt(n)
    for s in (0.3, 1.0, 3.0):
        res = discretized_gauss_1d(n, h / 3, s)
        assert res.I_d == pytest.approx(lattice_sum_1d(n, s, h / 3), rel=1e-12)
        assert res.bound_ok
        assert normalized_margin(res, n, s) <= 1


def test_1d_small_s_limit():
    n = 9
    res = discretized_gauss_1d(n, 0.0, 1e-6)
    assert res.I_d == pytest.approx(2 * (n + 1) / math.sqrt(n), rel=1e-9)
    assert res.ratio < 1e-5


def test_1d_rejects_bad_s():
    with pytest.raises(DomainError):
        discretized_gauss_1d(4, 0.0, 0.0)


def test_2d_identity_factorizes():
    for n in (4, 25):
        res = discretized_gauss_2d(n, np.eye(2))
        assert res.I_d == pytest.approx(lattice_sum_1d(n, 1.0) * math.sqrt(2 * math.pi), rel=1e-13)
        assert res.bound == pytest.approx(discretized_gauss_1d(n, 0.0, 1.0).bound * math.sqrt(2 * math.pi), rel=1e-13)


def test_2d_diag():
    res = discretized_gauss_2d(16, np.diag([4.0, 1.0]))
    assert res.I_d == pytest.approx(lattice_sum_1d(16, 2.0) * math.sqrt(2 * math.pi), rel=1e-13)
    assert res.bound == pytest.approx((1 + 4 * ETA / 16) * 2 * math.pi / 2, rel=1e-13)
    assert res.bound_ok


def test_2d_fixture_against_trapezoid_oracle():
    A = assemble_A(proof_matrix_B(0.5, 3.0), 0.5)
    n = 9
    res = discretized_gauss_2d(n, A)
    h = 2 / math.sqrt(n)
    want = h * sum(inner_trapezoid(A, [h * (k - n / 2)]) for k in range(n + 1))
    assert res.I_d == pytest.approx(want, rel=1e-10)
    assert res.I_c == pytest.approx(2 * math.pi / math.sqrt(np.linalg.det(A)), rel=1e-14)
    assert res.bound_ok


def test_3d_diag_separable():
    A = np.diag([1.0, 2.0, 3.0])
    res = discretized_gauss_3d(4, 9, A)
    want = lattice_sum_1d(4, 1.0) * lattice_sum_1d(9, math.sqrt(2.0)) * math.sqrt(2 * math.pi / 3)
    assert res.I_d == pytest.approx(want, rel=1e-13)
    assert res.bound == pytest.approx((1 + ETA / 4) * (1 + 2 * ETA / 9) * (2 * math.pi) ** 1.5 / math.sqrt(6), rel=1e-13)
    assert discretized_gauss_1d(4, 0, 1.0).bound_ok and discretized_gauss_1d(9, 0, math.sqrt(2)).bound_ok
    assert res.bound_ok


def test_3d_identity():
    res = discretized_gauss_3d(16, 16, np.eye(3))
    assert res.I_d == pytest.approx(lattice_sum_1d(16, 1.0) ** 2 * math.sqrt(2 * math.pi), rel=1e-13)


def test_3d_fixture_against_trapezoid_oracle():
    A = assemble_A(proof_matrix_Btilde(0.4, 3.0, -1), 0.3)
    n, n2 = 4, 9
    h1, h2 = 2 / math.sqrt(n), 2 / math.sqrt(n2)
    want = h1 * h2 * sum(
        inner_trapezoid(A, [h1 * (i - n / 2), h2 * (j - n2 / 2)]) for i in range(n + 1) for j in range(n2 + 1)
    )
    assert discretized_gauss_3d(n, n2, A).I_d == pytest.approx(want, rel=1e-10)


@pytest.mark.parametrize("sign", [-1, 1])
@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
def test_3d_btilde_fixtures(sign, alpha):
    for lam in (0.05, 0.2):
        A = assemble_A(proof_matrix_Btilde(alpha, 3.0, sign), lam)
        res = discretized_gauss_3d(64, 64, A)
        assert res.bound_ok
        quad = discretized_gauss_3d(8, 8, A, method="quad")
        assert quad.I_d == pytest.approx(discretized_gauss_3d(8, 8, A).I_d, rel=1e-9)


def test_non_pd_rejected():
    with pytest.raises(DomainError):
        discretized_gauss_2d(4, np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(DomainError):
        discretized_gauss_3d(4, 4, np.eye(2))


@settings(max_examples=25, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(0.2, 5.0), st.floats(-0.9, 0.9), st.sampled_from([1, 3, 16, 50]))
def test_2d_methods_agree(d1, d2, corr, n):
    off = corr * math.sqrt(d1 * d2)
    A = np.array([[d1, off], [off, d2]])
    closed = discretized_gauss_2d(n, A)
    quad = discretized_gauss_2d(n, A, method="quad")
    assert quad.I_d == pytest.approx(closed.I_d, rel=1e-9)
    assert closed.bound_ok


def test_em_linear_function_is_exact():
    res = extended_em_identity(PolynomialFn([0.0, 1.0]), 0.0, 1.0, 8, 0.125)
    assert abs(res.lhs) < 1e-15 and abs(res.rhs) < 1e-15


@pytest.mark.parametrize("b2bar", [0.0, 0.125, 1 / 6])
def test_em_gaussian_identity(b2bar):
    fn = GaussianBump(1.0)
    res = extended_em_identity(fn, -3.0, 3.0, 32, b2bar)
    assert res.residual <= 1e-10


def test_trapezoid_gap_oracle():
    fn = GaussianBump(2.0, 0.3)
    a, b, n = -1.0, 2.0, 10
    delta = (b - a) / (n + 2)
    y = [a + j * delta for j in range(n + 3)]
    f = [math.exp(-2.0 * (t - 0.3) ** 2) for t in y]
    trap = delta * (0.5 * f[0] + sum(f[1:-1]) + 0.5 * f[-1])
    exact = math.sqrt(math.pi / 2) / 2 * (math.erf(2 * (b - 0.3) / math.sqrt(2)) - math.erf(2 * (a - 0.3) / math.sqrt(2)))
    assert trapezoid_gap(fn, a, b, n) == pytest.approx(trap - exact, rel=1e-12, abs=1e-15)


def test_bernoulli_polynomial_b2():
    B2 = bernoulli_polynomial(2)
    assert np.allclose(B2.coef, [1 / 6, -1, 1])


def test_b2bar_one_sixth_is_classical():
    for fn in (GaussianBump(0.5), GaussianBump(2.0, 0.3), PolynomialFn([1.0, -2.0, 0.5, 0.25])):
        ext = extended_em_identity(fn, -1.0, 2.0, 8, 1 / 6).rhs
        assert ext == pytest.approx(em_classical_rhs_m0(fn, -1.0, 2.0, 8), abs=1e-12)


def test_em_constants():
    c = em_bound_constant_check()
    assert c.ok
    assert c.minmax_value == pytest.approx(0.125, abs=1e-9)
    assert c.b2bar_star == pytest.approx(0.125, abs=1e-6)
    assert c.max_abs_derivative[2.0] == pytest.approx(2 / math.sqrt(math.e), abs=1e-9)
    assert 2 / math.sqrt(math.e) == pytest.approx(1.21306, abs=1e-5)
    assert c.eta == pytest.approx(ETA, abs=1e-9)


def test_minmax_values_direct():
    x = np.linspace(0, 1, 100_001)
    assert np.max(np.abs(x * x - x + 1 / 8)) == pytest.approx(1 / 8, abs=1e-12)
    assert np.max(np.abs(x * x - x + 1 / 6)) == pytest.approx(1 / 6, abs=1e-12)
