"""Acceptance criteria 1-11, one PASS/FAIL line each (see the terminal summary)."""

import csv
import math
import time
from math import comb

import numpy as np

from hardycomp import cli
from hardycomp.certificates import tail_upper_at_index
from hardycomp.decayfit import gamma_estimate, stretch_exponent_fit
from hardycomp.galerkin import approx_numbers, hs_norm_sq, unboundedness_witness
from hardycomp.hardy import DomainSpec, inner, kernel_series
from hardycomp.multiindex import count_upto, enumerate_upto, exponent_table
from hardycomp.powerseries import TruncatedSeries, compose1d
from hardycomp.symbols import DiagonalLinear, Lens, Linear, Scale


def test_c01_diagonal_exactness(criterion):
    start = time.perf_counter()
    worst = 0.0
    for r in (0.3, 0.5, 0.8):
        a = approx_numbers(DiagonalLinear([r, r]), p=20).values
        exact = np.sort(r ** exponent_table(2, 20).sum(axis=1).astype(float))[::-1]
        worst = max(worst, float(np.max(np.abs(a - exact))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-12 and elapsed < 10
    criterion(1, "diagonal oracle exactness", ok, f"max err {worst:.2e}, {elapsed:.2f}s")
    assert ok


def test_c02_gamma_closed_form(criterion):
    target = math.sqrt(2) * math.log(2)
    a = approx_numbers(DiagonalLinear([0.5, 0.5]), p=20).values
    fit = gamma_estimate(a, d=2, window=(100, 231))
    rel = abs(fit.slope - target) / target
    ok = rel < 0.15
    criterion(2, "gamma closed form", ok, f"slope {fit.slope:.4f} vs {target:.4f}, rel {rel:.3f}")
    assert ok


def test_c03_counting(criterion):
    bad = []
    for d in range(1, 7):
        # enumerate once at p = 30; lower degrees form graded prefixes
        degrees = np.array([a.degree for a in enumerate_upto(d, 30)])
        if np.any(np.diff(degrees) < 0):
            bad.append((d, "order"))
        for p in range(31):
            n = comb(d + p, d)
            if count_upto(d, p) != n or int(np.sum(degrees <= p)) != n:
                bad.append((d, p))
            if d <= 4 and len(enumerate_upto(d, p)) != n:
                bad.append((d, p))
    ok = not bad
    criterion(3, "multi-index counting", ok, f"mismatches {bad[:3]}" if bad else "d<=6, p<=30")
    assert ok


def test_c04_lens_semigroup(criterion):
    cap = 25
    comp = compose1d(Lens([0.7]).taylor(cap)[0], Lens([0.6]).taylor(cap)[0])
    err = float(np.max(np.abs(comp.coeffs - Lens([0.42]).taylor(cap)[0].coeffs)))
    ok = err < 1e-9
    criterion(4, "lens semigroup", ok, f"max coefficient err {err:.2e}")
    assert ok


def test_c05_multinomial_identity(criterion):
    rng = np.random.default_rng(2024)
    symbols = [Lens([0.5, 0.7]), Scale(0.6, Lens([0.5, 0.4, 0.8])),
               Linear([[0.4, 0.3], [0.1, 0.5]], DomainSpec.ball(2))]
    worst = 0.0
    for phi in symbols:
        v = phi.eval(phi.dom.random_interior(25, rng))
        d = phi.dim
        for p in range(1, 9):
            betas = exponent_table(d, p)
            betas = betas[betas.sum(axis=1) == p]
            log_coef = math.lgamma(p + 1) - np.sum([[math.lgamma(b + 1) for b in row] for row in betas], axis=1)
            mono = np.abs(np.prod(v[:, None, :] ** betas[None], axis=2)) ** 2
            lhs = mono @ np.exp(log_coef)
            rhs = np.sum(np.abs(v) ** 2, axis=1) ** p
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / rhs)))
    ok = worst < 1e-10
    criterion(5, "multinomial identity", ok, f"max rel err {worst:.2e}")
    assert ok


def test_c06_hs_tensor_factorisation(criterion):
    p = 60
    one = hs_norm_sq(Lens([0.5]), p=p)
    two = hs_norm_sq(Lens([0.5, 0.5]), p=p, index_set="box")
    rel = abs(two - one * one) / two
    ok = rel < 1e-8
    criterion(6, "HS tensor factorisation", ok, f"rel gap {rel:.2e}")
    assert ok


def test_c07_unboundedness_witness(criterion):
    err = abs(unboundedness_witness(10) - 1024 / math.sqrt(184756))
    ratios = np.array([unboundedness_witness(n) for n in range(1, 501)])
    increasing = bool(np.all(np.diff(ratios) > 0))
    ok = err < 1e-10 and increasing
    criterion(7, "unboundedness witness", ok, f"err {err:.1e}, increasing to 500: {increasing}")
    assert ok


def test_c08_soundness_sandwich(criterion, tmp_path):
    sym = tmp_path / "scaled_lens.json"
    sym.write_text('{"domain": {"blocks": [1, 1]}, "symbol": '
                   '{"type": "scale", "s": 0.6, "inner": {"type": "lens", "theta": [0.5, 0.5]}}}')
    code = cli.main(["bounds", "--symbol", str(sym), "--degree", "25", "--certificates",
                     "weyl,kernel,tail", "--out", str(tmp_path)])
    with open(tmp_path / "bounds.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))[:15]
    dom = DomainSpec.polydisk(2)
    violations = []
    for row in rows:
        n = int(row["n"])
        upper = tail_upper_at_index(dom, 0.6, n)
        if float(row["upper_tail"]) != upper:
            violations.append((n, "tail"))
        for key in ("lower_weyl", "lower_kernel"):
            if row[key] and float(row[key]) > upper:
                violations.append((n, key))
    kernels = sum(bool(r["lower_kernel"]) for r in rows)
    ok = code == 0 and not violations and kernels >= 2 and all(r["lower_weyl"] for r in rows)
    criterion(8, "soundness sandwich", ok, f"exit {code}, violations {violations}, kernel rows {kernels}")
    assert ok


def test_c09_interlacing(criterion):
    phi = Lens([0.5, 0.5])
    m = count_upto(2, 10)
    prev, worst = None, 0.0
    for p in range(10, 25, 2):
        a = approx_numbers(phi, p=p).values[:m]
        if prev is not None:
            worst = min(worst, float(np.min(a - prev)))
        prev = a
    ok = worst >= -1e-12
    criterion(9, "interlacing", ok, f"most negative step {worst:.2e}")
    assert ok


def test_c10_stretched_exponent_band(criterion):
    start = time.perf_counter()
    a = approx_numbers(Lens([0.5]), p=600).values
    nu = stretch_exponent_fit(a, window=(100, 600))
    elapsed = time.perf_counter() - start
    ok = 0.28 <= nu <= 0.58 and elapsed < 300
    criterion(10, "stretched exponent band", ok, f"nu {nu:.4f} (band [0.28, 0.58]), {elapsed:.1f}s")
    assert ok


def test_c11_reproducing_property(criterion):
    rng = np.random.default_rng(11)
    cap = 40
    worst = 0.0
    for dom in (DomainSpec.polydisk(2), DomainSpec.ball(2)):
        for _ in range(25):
            deg = int(rng.integers(1, 9))
            coeffs = np.zeros(count_upto(2, cap), dtype=complex)
            k = count_upto(2, deg)
            coeffs[:k] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
            f = TruncatedSeries(2, cap, coeffs)
            a = dom.random_interior(1, rng, radius=0.9)[0]
            lhs = inner(dom, f, kernel_series(dom, a, cap))
            rhs = complex(f(a))
            worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    ok = worst < 1e-10
    criterion(11, "kernel reproducing property", ok, f"max err {worst:.2e} over 50 pairs")
    assert ok
