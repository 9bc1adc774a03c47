"""Computable lower and upper bounds for the true approximation numbers.

* Weyl/spectral lower bound: eigenvalues of C_phi are the products
  ``mu^alpha`` of eigenvalues of phi'(0), and ``|lambda_{2n}|**2 <= a_1 a_n``.
* Kernel lower bound: ``C_phi^* K_u = K_{phi(u)}``, so on the span of N kernels
  the adjoint is bounded below by the square root of the smallest eigenvalue
  of the pencil (G_v, G_u).
* Tail upper bound: for ||phi||_inf = r < 1, dropping all |alpha| > n leaves an
  error of at most ``sqrt(sum_{k>n} C(k+d-1, d-1) r**(2k))``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from hardycomp.hardy import BoundaryPointError, DomainSpec, gram_kernels
from hardycomp.multiindex import count_exact, count_upto, exponent_table
from hardycomp.symbols import Symbol

MAX_GRAM_CONDITION = 1e12


class CertificateError(ValueError):
    """A certificate's hypotheses are not met."""


class IllConditionedGramError(CertificateError):
    pass


class SoundnessError(AssertionError):
    """A lower certificate exceeded an upper certificate."""


@dataclass
class BoundReport:
    n: int
    compressed: float | None = None
    lower_weyl: float | None = None
    lower_kernel: float | None = None
    upper_tail: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def lowers(self) -> list[float]:
        return [v for v in (self.lower_weyl, self.lower_kernel, self.compressed) if v is not None]

    def is_sound(self, rtol: float = 1e-12) -> bool:
        """Every present lower estimate is <= the upper certificate."""
        if self.upper_tail is None:
            return True
        return all(v <= self.upper_tail * (1 + rtol) for v in self.lowers)


def clahane_spectrum(mu, p: int) -> np.ndarray:
    """Moduli ``|mu^alpha|`` for |alpha| <= p, sorted in non-increasing order.

    The first entry is 1 (alpha = 0).
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=complex))
    mods = np.abs(mu)
    if np.any(mods == 0):
        raise CertificateError(
            "phi'(0) has a zero eigenvalue: phi is not truly d-dimensional, "
            "and 0 cannot be an eigenvalue of C_phi")
    exps = exponent_table(len(mu), p)
    logs = exps @ np.log(mods)
    return np.sort(np.exp(logs))[::-1]


def weyl_lower_bound(spectrum, a1: float, n: int) -> float:
    """``|lambda_{2n}|**2 / a1`` (1-based ``n``); a lower bound for a_n when a1 >= a_1."""
    spectrum = np.asarray(spectrum, dtype=float)
    if n < 1 or 2 * n > len(spectrum):
        raise IndexError(f"need 2n <= {len(spectrum)} eigenvalues, got n = {n}")
    if a1 <= 0:
        raise CertificateError("a1 must be positive")
    return float(spectrum[2 * n - 1] ** 2 / a1)


def lens_grid(sigma: float, n: int, d: int) -> np.ndarray:
    """Points ``(1 - e^{-j_1 sigma}, ..., 1 - e^{-j_d sigma})`` for 1 <= j_k <= n."""
    if sigma <= 0 or n < 1 or d < 1:
        raise ValueError("need sigma > 0, n >= 1, d >= 1")
    axis = -np.expm1(-sigma * np.arange(1, n + 1))
    return np.array(list(itertools.product(axis, repeat=d)), dtype=complex).reshape(-1, d)


def kernel_bernstein_lower(phi: Symbol, dom: DomainSpec | None, pts) -> float:
    """Lower bound for a_N(C_phi) from N reproducing kernels at ``pts``."""
    if not phi.bounded:
        raise CertificateError("kernel certificate needs a bounded symbol")
    dom = dom or phi.dom
    pts = np.atleast_2d(np.asarray(pts, dtype=complex))
    images = phi.eval(pts)
    Gu = gram_kernels(dom, pts)
    Gv = gram_kernels(dom, images)
    cond = np.linalg.cond(Gu)
    if not np.isfinite(cond) or cond > MAX_GRAM_CONDITION:
        raise IllConditionedGramError(
            f"kernel Gram matrix condition {cond:.3g} exceeds {MAX_GRAM_CONDITION:.0e}; "
            "spread the points apart")
    Gu = 0.5 * (Gu + Gu.conj().T)
    Gv = 0.5 * (Gv + Gv.conj().T)
    evals = scipy.linalg.eigh(Gv, Gu, eigvals_only=True)
    return float(math.sqrt(max(evals.min(), 0.0)))


def roots_of_unity_interp_constant(r: float, n: int) -> float:
    """Interpolation constant ``r**(1-n)`` of the n-th roots of unity scaled by r."""
    if not 0 < r < 1 or n < 1:
        raise ValueError("need 0 < r < 1 and n >= 1")
    return r ** (1 - n)


def product_bound(*constants: float) -> float:
    """Interpolation constant bound for a cartesian product of sequences."""
    return float(np.prod(constants))


def truncation_tail_upper(dom: DomainSpec, r: float, n: int) -> float:
    """Upper bound for ``a_{N_n + 1}`` where N_n = count_upto(d, n).

    ``n = -1`` is accepted and bounds ``a_1 = ||C_phi||``.
    """
    if r >= 1:
        raise CertificateError(
            "tail certificate inapplicable; symbol does not satisfy ||phi||_inf < 1")
    if r < 0:
        raise ValueError("r must be non-negative")
    if n < -1:
        raise ValueError("n must be >= -1")
    if r == 0:
        return 0.0 if n >= 0 else 1.0
    d = dom.dim
    log_t = 2.0 * math.log(r)
    total = 0.0
    k = n + 1
    while True:
        term = math.exp(math.log(count_exact(d, k)) + k * log_t)
        total += term
        ratio = (k + d) / (k + 1) * r * r
        # once terms decrease geometrically the remainder is at most term * ratio / (1 - ratio)
        if ratio < 1 and term * ratio / (1 - ratio) <= 1e-17 * total:
            break
        k += 1
        if k > n + 10**6:
            raise FloatingPointError("tail series failed to converge")
    return math.sqrt(total)


def tail_degree_for_index(d: int, m: int) -> int:
    """Largest n with count_upto(d, n) + 1 <= m (``-1`` when m = 1)."""
    if m < 1:
        raise ValueError("index must be >= 1")
    n = -1
    while count_upto(d, n + 1) + 1 <= m:
        n += 1
    return n


def tail_upper_at_index(dom: DomainSpec, r: float, m: int) -> float:
    """Tail certificate for a_m, using the sharpest degree compatible with m."""
    return truncation_tail_upper(dom, r, tail_degree_for_index(dom.dim, m))


def check_sandwich(reports) -> list[BoundReport]:
    """Return the reports whose lower estimates exceed the upper certificate."""
    return [rep for rep in reports if not rep.is_sound()]


def compute_bounds(phi: Symbol, p: int, certificates=("weyl", "kernel", "tail"),
                   grid_sigma: float = 1.0, grid_n: int = 3, a1=None, r: float | None = None,
                   jobs: int = 1, rng=0, max_basis: int | None = None):
    """Bound table for n = 1..count_upto(d, p) plus a provenance record.

    ``a1`` selects the norm used by the Weyl bound: ``None`` (compressed top
    singular value, not rigorous), ``"tail"`` (the rigorous tail bound for
    a_1, needs ||phi||_inf < 1) or an explicit number.
    """
    from hardycomp.galerkin import DEFAULT_MAX_BASIS, approx_numbers
    from hardycomp.symbols import FixedPointError, jacobian_at_zero

    unknown = set(certificates) - {"weyl", "kernel", "tail"}
    if unknown:
        raise ValueError(f"unknown certificates {sorted(unknown)}")
    dom = phi.dom
    d = dom.dim
    approx = approx_numbers(phi, dom, p, jobs, max_basis or DEFAULT_MAX_BASIS)
    values = approx.values
    reports = [BoundReport(n=i + 1, compressed=float(v)) for i, v in enumerate(values)]
    N = len(reports)
    prov: dict = {
        "symbol": repr(phi),
        "degree": p,
        "basis_size": N,
        "certificates": list(certificates),
        "interlacing_ok": approx.interlacing_ok,
        "interlacing_max_gap": approx.max_gap,
        "notes": [],
    }

    if "tail" in certificates or a1 == "tail":
        if r is None:
            est = phi.sup_norm_estimate(rng)
            r_val, prov["sup_norm_samples"] = est.value, est.samples
            prov["sup_norm_source"] = "sampled estimate" if est.samples else "exact"
        else:
            r_val = float(r)
            prov["sup_norm_source"] = "user supplied"
        prov["sup_norm"] = r_val

    if "tail" in certificates:
        if r_val >= 1:
            reason = "||phi||_inf = 1"
            prov["notes"].append(f"upper_tail blank: {reason}")
            for rep in reports:
                rep.notes.append(f"tail: {reason}")
        else:
            cache: dict[int, float] = {}
            for rep in reports:
                deg = tail_degree_for_index(d, rep.n)
                if deg not in cache:
                    cache[deg] = truncation_tail_upper(dom, r_val, deg)
                rep.upper_tail = cache[deg]

    if "weyl" in certificates:
        try:
            info = jacobian_at_zero(phi)
            if not info.truly_d_dimensional:
                raise CertificateError("phi'(0) is singular: not truly d-dimensional at 0")
            spec_deg = p
            while count_upto(d, spec_deg) < 2 * N:
                spec_deg += 1
            spectrum = clahane_spectrum(info.eigenvalues, spec_deg)
            if a1 is None:
                a1_val = float(values[0])
                prov["weyl_a1_source"] = "compressed top singular value (lower estimate of a_1; bound not rigorous)"
            elif a1 == "tail":
                if r_val >= 1:
                    raise CertificateError("a1='tail' needs ||phi||_inf < 1")
                a1_val = truncation_tail_upper(dom, r_val, -1)
                prov["weyl_a1_source"] = "tail bound on ||C_phi|| (rigorous)"
            else:
                a1_val = float(a1)
                prov["weyl_a1_source"] = "user supplied"
            prov["weyl_a1"] = a1_val
            prov["jacobian_eigenvalues"] = [[z.real, z.imag] for z in info.eigenvalues]
            prov["notes"].append(
                f"weyl: eigenvalue products truncated at degree {spec_deg}; "
                "truncation can only lower the bound")
            for rep in reports:
                rep.lower_weyl = weyl_lower_bound(spectrum, a1_val, rep.n)
        except (CertificateError, FixedPointError) as exc:
            prov["notes"].append(f"lower_weyl blank: {exc}")
            for rep in reports:
                rep.notes.append("weyl: inapplicable")

    if "kernel" in certificates:
        prov["grid"] = {"sigma": grid_sigma, "n": grid_n}
        prov["notes"].append(
            "kernel: generalized-eigenvalue bound on span of reproducing kernels; "
            "replaces the interpolation-constant inequality, whose constant is not computable here")
        for k in range(1, grid_n + 1):
            m = k**d
            if m > N:
                break
            try:
                val = kernel_bernstein_lower(phi, dom, lens_grid(grid_sigma, k, d))
            except (CertificateError, BoundaryPointError) as exc:
                prov["notes"].append(f"lower_kernel at n={m} skipped: {exc}")
                reports[m - 1].notes.append("kernel: skipped")
                break
            reports[m - 1].lower_kernel = val

    bad = check_sandwich(reports)
    prov["sound"] = not bad
    prov["violations"] = [rep.n for rep in bad]
    return reports, prov
