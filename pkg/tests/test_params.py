import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superpose import ChannelSpec, CodeSpec, DomainError, capacity, c_alpha, derive_code_spec
from superpose.params import code_spec_for_rate, to_bits


@pytest.mark.parametrize("v, nats, bits", [(3, math.log(2), 1.0), (1, 0.5 * math.log(2), 0.5), (15, 2 * math.log(2), 2.0)])
def test_capacity_values(v, nats, bits):
    assert capacity(v) == pytest.approx(nats, abs=1e-15)
    assert to_bits(capacity(v)) == pytest.approx(bits, abs=1e-15)


@pytest.mark.parametrize("v", [0.0, -1.0, float("nan")])
def test_capacity_rejects_nonpositive_snr(v):
    with pytest.raises(DomainError):
        capacity(v)


def test_c_alpha_values():
    assert c_alpha(0.0, 7) == 0.0
    assert c_alpha(1.0, 3) == pytest.approx(math.log(2), abs=1e-15)
    assert c_alpha(0.5, 2) == pytest.approx(0.5 * math.log(2), abs=1e-15)


@pytest.mark.parametrize("alpha", [-0.01, 1.01])
def test_c_alpha_rejects_alpha_outside_unit_interval(alpha):
    with pytest.raises(DomainError):
        c_alpha(alpha, 1.0)


@pytest.mark.parametrize("v", [0.1, 1.0, 15.0, 1e3])
def test_partial_capacity_concave_gap(v):
    alphas = np.linspace(0, 1, 10_001)
    gap = np.array([c_alpha(a, v) for a in alphas]) - alphas * capacity(v)
    assert gap.min() >= -1e-15
    assert abs(gap[0]) < 1e-12 and abs(gap[-1]) < 1e-12
    assert np.all(gap[1:-1] > 0)


def test_capacity_increasing():
    vals = [capacity(v) for v in np.geomspace(1e-3, 1e4, 500)]
    assert np.all(np.diff(vals) > 0)


def test_channel_spec_snr_is_derived():
    ch = ChannelSpec(P=15.0, sigma2=1.0)
    assert ch.v == 15.0
    assert ch.capacity_bits == pytest.approx(2.0)
    assert ChannelSpec.from_snr(3.0, P=2.0).sigma2 == pytest.approx(2.0 / 3.0)
    with pytest.raises(DomainError):
        ChannelSpec(P=1.0, sigma2=0.0)


@pytest.mark.parametrize(
    "L, a, R, M, N, K, n",
    [(4, 1.0, 0.5, 4, 16, 8.0, 11), (2, 1.0, math.log(2), 2, 4, 2.0, 2), (9, 2.0, 1.0, 81, 729, 9 * math.log2(81), 40)],
)
def test_derive_code_spec_examples(L, a, R, M, N, K, n):
    spec = derive_code_spec(L, a, R)
    assert (spec.M, spec.N, spec.n) == (M, N, n)
    assert spec.K == pytest.approx(K)
    # the stored rate is the one realized by the rounded length
    assert spec.R == pytest.approx(L * math.log(M) / n)


def test_derive_code_spec_independent_arithmetic():
    # oracle: plain arithmetic without the library
    for L, a, R in [(6, math.log(8) / math.log(6), 0.3 * 0.5 * math.log(16)), (10, 1.5, 0.2), (100, 1.0, 0.7)]:
        spec = derive_code_spec(L, a, R)
        assert spec.M == math.ceil(L**a - 1e-9)
        assert spec.n == round(a * L * math.log(L) / R)


def test_criterion9_geometry():
    spec = derive_code_spec(6, math.log(8) / math.log(6), 0.3 * capacity(15))
    assert (spec.M, spec.n) == (8, 30)
    assert spec.R == pytest.approx(6 * math.log(8) / 30)


def test_derive_code_spec_errors():
    with pytest.raises(DomainError):
        derive_code_spec(1, 1.0, 0.5)
    with pytest.raises(DomainError):
        derive_code_spec(2, 1.0, 100.0)


def test_code_spec_for_rate():
    spec = code_spec_for_rate(6, 8, 0.3 * capacity(15))
    assert spec.n == 30 and spec.M == 8


@given(st.integers(2, 200), st.floats(0.5, 3.0), st.floats(0.05, 2.0))
def test_code_spec_invariants(L, a, R):
    try:
        spec = derive_code_spec(L, a, R)
    except DomainError:
        return
    assert spec.N == spec.L * spec.M
    assert spec.M >= L**a * (1 - 1e-9)
    assert spec.M - 1 < L**a * (1 + 1e-9)
    assert spec.K * math.log(2) == pytest.approx(spec.L * math.log(spec.M), rel=1e-12)
    assert spec.n >= 1


def test_code_spec_is_immutable():
    spec = CodeSpec.from_sizes(6, 8, 30)
    with pytest.raises(AttributeError):
        spec.n = 31
