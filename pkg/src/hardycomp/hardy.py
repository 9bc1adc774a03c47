"""Hardy space H^2 on a product of unit balls B_{l_1} x ... x B_{l_N}.

Functions are represented by their Taylor coefficients; the monomials are
orthogonal with the norms given by :func:`monomial_norm_sq`, and the
reproducing kernel factorises over the blocks as ``(1 - <z_k, a_k>)**(-l_k)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from hardycomp.multiindex import MultiIndex, exponent_table
from hardycomp.powerseries import TruncatedSeries, binomial_series, mul

BOUNDARY_TOL = 1e-12


class BoundaryPointError(ValueError):
    """A point lies on (or outside) the boundary of the domain."""


@dataclass(frozen=True)
class DomainSpec:
    """Block dimensions ``(l_1, ..., l_N)`` of Omega = B_{l_1} x ... x B_{l_N}."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        if not blocks or any(b < 1 for b in blocks):
            raise ValueError(f"invalid block structure {self.blocks!r}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def polydisk(cls, d: int) -> DomainSpec:
        return cls((1,) * d)

    @classmethod
    def ball(cls, d: int) -> DomainSpec:
        return cls((d,))

    @property
    def dim(self) -> int:
        return sum(self.blocks)

    @property
    def is_polydisk(self) -> bool:
        return all(b == 1 for b in self.blocks)

    @property
    def offsets(self) -> list[slice]:
        out, start = [], 0
        for b in self.blocks:
            out.append(slice(start, start + b))
            start += b
        return out

    def block_norms(self, z) -> np.ndarray:
        """Euclidean norm of each block, shape (..., N)."""
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.dim:
            raise ValueError(f"point has {z.shape[-1]} coordinates, domain has {self.dim}")
        return np.stack([np.linalg.norm(z[..., s], axis=-1) for s in self.offsets], axis=-1)

    def norm(self, z) -> np.ndarray:
        """The norm whose open unit ball is Omega (max of block norms)."""
        return self.block_norms(z).max(axis=-1)

    def is_interior(self, z, tol: float = BOUNDARY_TOL) -> np.ndarray:
        return self.norm(z) < 1.0 - tol

    def check_interior(self, z) -> None:
        if not np.all(self.is_interior(z)):
            raise BoundaryPointError("point(s) not in the interior of the domain")

    def random_interior(self, n: int, rng=None, radius: float = 1.0) -> np.ndarray:
        """``n`` points drawn uniformly from ``radius * Omega``."""
        rng = np.random.default_rng(rng)
        parts = []
        for b in self.blocks:
            g = rng.standard_normal((n, b)) + 1j * rng.standard_normal((n, b))
            g /= np.linalg.norm(g, axis=1, keepdims=True)
            rad = rng.uniform(size=(n, 1)) ** (1.0 / (2 * b))
            parts.append(g * rad * radius * (1 - 1e-9))
        return np.concatenate(parts, axis=1)

    def random_boundary(self, n: int, rng=None) -> np.ndarray:
        """``n`` points on the distinguished boundary S_{l_1} x ... x S_{l_N}."""
        rng = np.random.default_rng(rng)
        parts = []
        for b in self.blocks:
            g = rng.standard_normal((n, b)) + 1j * rng.standard_normal((n, b))
            parts.append(g / np.linalg.norm(g, axis=1, keepdims=True))
        return np.concatenate(parts, axis=1)


def _block_degrees(dom: DomainSpec, exps: np.ndarray) -> np.ndarray:
    return np.stack([exps[..., s].sum(axis=-1) for s in dom.offsets], axis=-1)


def log_monomial_norm_sq(dom: DomainSpec, exps) -> np.ndarray:
    """Vectorised log of ``||z^alpha||^2`` for an int array of exponents (..., d)."""
    exps = np.asarray(exps)
    if exps.shape[-1] != dom.dim:
        raise ValueError("exponent dimension does not match the domain")
    out = gammaln(exps + 1.0).sum(axis=-1)
    deg = _block_degrees(dom, exps)
    ls = np.asarray(dom.blocks, dtype=float)
    out = out + (gammaln(ls) - gammaln(ls + deg)).sum(axis=-1)
    return out


def monomial_norm_sq(dom: DomainSpec, alpha) -> float:
    """``||z^alpha||^2 = prod_k (l_k-1)! beta_k! / (l_k - 1 + |beta_k|)!``."""
    exps = alpha.exponents if isinstance(alpha, MultiIndex) else tuple(alpha)
    return float(np.exp(log_monomial_norm_sq(dom, np.array(exps))))


def monomial_weights(dom: DomainSpec, p: int) -> np.ndarray:
    """``||e_alpha||^2`` for all |alpha| <= p in rank order."""
    return np.exp(log_monomial_norm_sq(dom, exponent_table(dom.dim, p)))


def kernel_value(dom: DomainSpec, a, z) -> np.ndarray:
    """``K_a(z) = prod_k (1 - <z_k, a_k>)**(-l_k)``; broadcasts over leading axes."""
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    dom.check_interior(a)
    dom.check_interior(z)
    out = 1.0 + 0j
    for b, s in zip(dom.blocks, dom.offsets):
        ip = np.sum(z[..., s] * np.conj(a[..., s]), axis=-1)
        out = out * (1.0 - ip) ** (-b)
    return out


def kernel_norm_sq(dom: DomainSpec, a) -> float:
    """``||K_a||^2 = K_a(a)``."""
    return float(np.real(kernel_value(dom, a, a)))


def gram_kernels(dom: DomainSpec, pts) -> np.ndarray:
    """Gram matrix ``G[i, j] = <K_{pts[j]}, K_{pts[i]}> = K_{pts[j]}(pts[i])``."""
    pts = np.atleast_2d(np.asarray(pts, dtype=complex))
    G = kernel_value(dom, pts[None, :, :], pts[:, None, :])
    n = len(pts)
    if n > 1:
        diff = np.abs(pts[:, None, :] - pts[None, :, :]).max(axis=-1)
        diff[np.diag_indices(n)] = np.inf
        if np.any(diff < 1e-14):
            warnings.warn("duplicate points: kernel Gram matrix is singular", RuntimeWarning)
    return G


def kernel_series(dom: DomainSpec, a, cap: int) -> TruncatedSeries:
    """Taylor coefficients of ``K_a`` obtained by expanding the closed form.

    Each block factor ``(1 - w)**(-l)`` is composed with the linear form
    ``w = <z_k, a_k>``; no monomial norms are involved.
    """
    a = np.asarray(a, dtype=complex)
    dom.check_interior(a)
    d = dom.dim
    outer_cache = {}
    result = TruncatedSeries.constant(d, cap)
    for b, s in zip(dom.blocks, dom.offsets):
        if b not in outer_cache:
            outer_cache[b] = binomial_series(-b, -1, cap)
        outer = outer_cache[b].coeffs
        w = TruncatedSeries(d, cap)
        for j in range(s.start, s.stop):
            w = w + TruncatedSeries.variable(d, cap, j, np.conj(a[j]))
        # Horner in the series ring
        factor = TruncatedSeries.constant(d, cap, outer[-1])
        for c in outer[-2::-1]:
            factor = mul(factor, w) + c
        result = mul(result, factor)
    return result


def inner(dom: DomainSpec, f: TruncatedSeries, g: TruncatedSeries) -> complex:
    """``<f, g>`` in H^2(Omega) for polynomials given as truncated series."""
    f._check(g)
    w = monomial_weights(dom, f.cap)
    return complex(np.sum(f.coeffs * np.conj(g.coeffs) * w))


def norm_sq(dom: DomainSpec, f: TruncatedSeries) -> float:
    return float(np.real(inner(dom, f, f)))


__all__ = [
    "BoundaryPointError", "DomainSpec", "monomial_norm_sq", "log_monomial_norm_sq",
    "monomial_weights", "kernel_value", "kernel_norm_sq", "gram_kernels",
    "kernel_series", "inner", "norm_sq",
]
