import warnings

import numpy as np
import pytest

from hardycomp.hardy import (
    BoundaryPointError,
    DomainSpec,
    gram_kernels,
    inner,
    kernel_norm_sq,
    kernel_series,
    kernel_value,
    monomial_norm_sq,
    monomial_weights,
)
from hardycomp.multiindex import enumerate_upto, exponent_table
from hardycomp.powerseries import TruncatedSeries

DOMAINS = [DomainSpec.polydisk(2), DomainSpec.ball(2), DomainSpec((2, 1)), DomainSpec.ball(3)]


def sphere_samples(rng, l, n):
    g = rng.standard_normal((n, l)) + 1j * rng.standard_normal((n, l))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def test_polydisk_norms_are_one():
    dom = DomainSpec.polydisk(3)
    for a in enumerate_upto(3, 8):
        assert monomial_norm_sq(dom, a) == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(monomial_weights(dom, 10), 1.0, atol=1e-14)


def test_ball_norm_examples():
    dom = DomainSpec.ball(2)
    assert monomial_norm_sq(dom, (1, 0)) == pytest.approx(0.5, rel=1e-14)
    assert monomial_norm_sq(dom, (1, 1)) == pytest.approx(1 / 6, rel=1e-14)


def test_ball_norms_against_monte_carlo():
    # E|u^beta|^2 over the unit sphere of C^2
    rng = np.random.default_rng(7)
    u = sphere_samples(rng, 2, 400_000)
    dom = DomainSpec.ball(2)
    for beta in enumerate_upto(2, 4):
        vals = np.abs(np.prod(u ** np.array(beta.exponents), axis=1)) ** 2
        mean, se = vals.mean(), vals.std(ddof=1) / np.sqrt(len(vals))
        assert abs(mean - monomial_norm_sq(dom, beta)) <= 3 * se + 1e-15


def test_product_domain_norm_factorises():
    dom = DomainSpec((2, 1))
    assert monomial_norm_sq(dom, (1, 1, 5)) == pytest.approx(1 / 6, rel=1e-14)


def test_large_degree_no_overflow():
    val = monomial_norm_sq(DomainSpec.ball(3), (200, 150, 100))
    assert 0 < val < 1 and np.isfinite(val)


def test_kernel_examples():
    pd = DomainSpec.polydisk(2)
    assert kernel_value(pd, [0, 0], [0.3, 0.4j]) == pytest.approx(1.0)
    assert kernel_value(pd, [0.5, 0], [0.5, 0.7]) == pytest.approx(4 / 3)
    ball = DomainSpec.ball(2)
    assert kernel_value(ball, [0.6, 0], [0.6, 0]) == pytest.approx(0.64**-2)


@pytest.mark.parametrize("dom,a", [(DomainSpec.ball(2), [0.6, 0.0]),
                                   (DomainSpec.ball(2), [0.3 + 0.2j, -0.4j]),
                                   (DomainSpec((2, 1)), [0.2, 0.3j, 0.5])])
def test_kernel_norm_matches_coefficient_sum(dom, a):
    # K_a(a) = sum_alpha |a^alpha|^2 / ||e_alpha||^2, summed to degree 60
    a = np.asarray(a, dtype=complex)
    exps = exponent_table(dom.dim, 60)
    mono = np.abs(np.prod(a ** exps, axis=1)) ** 2
    total = np.sum(mono / monomial_weights(dom, 60))
    assert kernel_norm_sq(dom, a) == pytest.approx(total, rel=1e-10)


def test_kernel_norm_examples():
    pd = DomainSpec.polydisk(2)
    assert kernel_norm_sq(pd, [0, 0]) == 1.0
    assert kernel_norm_sq(pd, [0.5, 0.5]) == pytest.approx(16 / 9)
    ray = [kernel_norm_sq(DomainSpec.ball(2), [t * 0.6, t * 0.3j]) for t in np.linspace(0, 1.2, 13)]
    assert np.all(np.diff(ray) > 0)


def test_boundary_rejected():
    with pytest.raises(BoundaryPointError):
        kernel_value(DomainSpec.polydisk(2), [1.0, 0], [0, 0])


def test_gram_examples():
    pd = DomainSpec.polydisk(2)
    assert np.allclose(gram_kernels(pd, [[0, 0]]), [[1]])
    G = gram_kernels(pd, [[0, 0], [0.5, 0]])
    np.testing.assert_allclose(G, [[1, 1], [1, 4 / 3]])


@pytest.mark.parametrize("dom", DOMAINS)
def test_gram_psd(dom):
    pts = dom.random_interior(20, rng=5)
    G = gram_kernels(dom, pts)
    np.testing.assert_allclose(G, G.conj().T, atol=1e-12)
    assert np.linalg.eigvalsh(G).min() >= -1e-10


def test_gram_duplicate_warns():
    with pytest.warns(RuntimeWarning):
        gram_kernels(DomainSpec.polydisk(1), [[0.2], [0.2]])


@pytest.mark.parametrize("dom", DOMAINS)
def test_reproducing_property(dom):
    rng = np.random.default_rng(11)
    cap = 10
    n = len(exponent_table(dom.dim, cap))
    for _ in range(10):
        f = TruncatedSeries(dom.dim, cap, rng.standard_normal(n) + 1j * rng.standard_normal(n))
        a = dom.random_interior(1, rng)[0] * 0.9
        assert inner(dom, f, kernel_series(dom, a, cap)) == pytest.approx(f(a), rel=1e-10, abs=1e-10)
