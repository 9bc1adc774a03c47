import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardycomp.multiindex import exponent_table
from hardycomp.powerseries import (
    SeriesMismatchError,
    SingularDivisionError,
    TruncatedSeries,
    binomial_series,
    compose1d,
    div,
    mul,
    substitute,
    tensor_power,
)
from hardycomp.symbols import lens_series


def series_from_dict(dim, cap, terms):
    c = np.zeros(len(exponent_table(dim, cap)), dtype=complex)
    table = {tuple(r): i for i, r in enumerate(exponent_table(dim, cap))}
    for alpha, v in terms.items():
        c[table[alpha]] = v
    return TruncatedSeries(dim, cap, c)


def naive_product(a, b):
    # dictionary convolution, independent of the grid code
    exps = [tuple(r) for r in exponent_table(a.dim, a.cap)]
    out = {}
    for (ea, ca), (eb, cb) in itertools.product(zip(exps, a.coeffs), zip(exps, b.coeffs)):
        e = tuple(x + y for x, y in zip(ea, eb))
        if sum(e) <= a.cap:
            out[e] = out.get(e, 0) + ca * cb
    return series_from_dict(a.dim, a.cap, out)


def random_series(rng, dim, cap):
    n = len(exponent_table(dim, cap))
    return TruncatedSeries(dim, cap, rng.standard_normal(n) + 1j * rng.standard_normal(n))


def test_binomial_examples():
    np.testing.assert_array_equal(binomial_series(1, 1, 4).coeffs, [1, 1, 0, 0, 0])
    assert binomial_series(0.5, 1, 3).coeffs[1] == 0.5
    assert binomial_series(0.5, -1, 3).coeffs[2] == pytest.approx(-0.125, abs=1e-16)


def test_mul_examples():
    z = TruncatedSeries.variable(1, 4, 0)
    assert np.allclose(((1 + z) * (1 - z)).coeffs, [1, 0, -1, 0, 0])
    a = series_from_dict(2, 3, {(0, 0): 2, (1, 2): 1j})
    assert np.array_equal((a * TruncatedSeries.constant(2, 3)).coeffs, a.coeffs)
    s = TruncatedSeries.variable(2, 3, 0) + TruncatedSeries.variable(2, 3, 1)
    sq = s * s
    assert sq.coeff((2, 0)) == 1 and sq.coeff((1, 1)) == 2 and sq.coeff((0, 2)) == 1
    assert np.count_nonzero(sq.coeffs) == 3


@pytest.mark.parametrize("dim,cap", [(1, 6), (2, 5), (3, 4)])
def test_mul_matches_naive_convolution(dim, cap):
    rng = np.random.default_rng(dim * 10 + cap)
    a, b = random_series(rng, dim, cap), random_series(rng, dim, cap)
    np.testing.assert_allclose(mul(a, b).coeffs, naive_product(a, b).coeffs, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 5), st.integers(0, 2**32 - 1))
def test_ring_axioms(dim, cap, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_series(rng, dim, cap) for _ in range(3))
    np.testing.assert_allclose(((a * b) * c).coeffs, (a * (b * c)).coeffs, atol=1e-12)
    np.testing.assert_allclose((a * (b + c)).coeffs, (a * b + a * c).coeffs, atol=1e-12)
    np.testing.assert_allclose((a * b).coeffs, (b * a).coeffs, atol=1e-12)


def test_div_examples():
    z = TruncatedSeries.variable(1, 8, 0)
    a = 2 + z - 3 * z * z
    np.testing.assert_allclose(div(a, a).coeffs, TruncatedSeries.constant(1, 8).coeffs, atol=1e-15)
    np.testing.assert_allclose(div(TruncatedSeries.constant(1, 8), 1 - z).coeffs, np.ones(9))
    plus, minus = binomial_series(1, 1, 8), binomial_series(1, -1, 8)
    np.testing.assert_allclose(div(plus - minus, plus + minus).coeffs, z.coeffs, atol=1e-15)


def test_div_singular():
    z = TruncatedSeries.variable(1, 5, 0)
    with pytest.raises(SingularDivisionError):
        div(z, z)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_div_roundtrip(dim, cap, seed):
    rng = np.random.default_rng(seed)
    a = random_series(rng, dim, cap)
    b = random_series(rng, dim, cap) * 0.2 + 1.0
    back = mul(div(a, b), b)
    scale = np.maximum(np.abs(a.coeffs), 1.0)
    assert np.all(np.abs(back.coeffs - a.coeffs) <= 1e-11 * scale)


def test_compose1d_examples():
    z = TruncatedSeries.variable(1, 6, 0)
    out = compose1d(z * z, z + z * z)
    np.testing.assert_allclose(out.coeffs, [0, 0, 1, 2, 1, 0, 0])
    f = 1 + 3 * z - z**4
    np.testing.assert_allclose(compose1d(f, z).coeffs, f.coeffs)
    with pytest.raises(ValueError):
        compose1d(f, 1 + z)


def test_lens_semigroup_series():
    cap = 25
    composed = compose1d(lens_series(0.7, cap), lens_series(0.6, cap))
    assert np.max(np.abs(composed.coeffs - lens_series(0.42, cap).coeffs)) < 1e-9


@pytest.mark.parametrize("theta", [0.3, 0.5, 0.9])
def test_lens_parity(theta):
    c = lens_series(theta, 40).coeffs
    assert np.max(np.abs(c[0::2])) < 1e-13
    assert c[1] == pytest.approx(theta, abs=1e-15)


def test_tensor_power_examples():
    ident = [TruncatedSeries.variable(2, 5, j) for j in range(2)]
    tp = tensor_power(ident, (2, 1))
    assert tp.coeff((2, 1)) == 1 and np.count_nonzero(tp.coeffs) == 1
    r = 0.7
    diag = [TruncatedSeries.variable(3, 6, j, r) for j in range(3)]
    for alpha in [(1, 0, 2), (0, 3, 1), (2, 2, 2)]:
        tp = tensor_power(diag, alpha)
        assert tp.coeff(alpha) == pytest.approx(r ** sum(alpha))
        assert np.count_nonzero(np.abs(tp.coeffs) > 1e-15) == 1
    lens = [TruncatedSeries.from_univariate(lens_series(0.5, 6).coeffs, 2, j) for j in range(2)]
    assert tensor_power(lens, (1, 1)).coeff((1, 1)) == pytest.approx(0.25)


def test_tensor_power_cap_mismatch():
    f = [TruncatedSeries.variable(2, 3, j) for j in range(2)]
    with pytest.raises(SeriesMismatchError):
        tensor_power(f, (1, 1), cap=5)


def test_substitute_matches_direct_product():
    rng = np.random.default_rng(3)
    cap = 5
    inner = [random_series(rng, 2, cap) for _ in range(2)]
    inner = [s - s.coeffs[0] for s in inner]
    outer = series_from_dict(2, cap, {(0, 0): 1.5, (1, 0): 2.0, (1, 1): -1.0, (0, 3): 0.5j})
    expected = 1.5 + 2.0 * inner[0] - inner[0] * inner[1] + 0.5j * inner[1] ** 3
    np.testing.assert_allclose(substitute(outer, inner).coeffs, expected.coeffs, atol=1e-12)


def test_evaluate_polynomial():
    s = series_from_dict(2, 3, {(0, 0): 1, (2, 1): 2, (0, 1): -1j})
    z = np.array([0.3 + 0.1j, -0.2j])
    assert s(z) == pytest.approx(1 + 2 * z[0] ** 2 * z[1] - 1j * z[1])


def test_mismatch_rejected():
    with pytest.raises(SeriesMismatchError):
        mul(TruncatedSeries.constant(2, 3), TruncatedSeries.constant(2, 4))
