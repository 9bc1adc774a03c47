"""Holomorphic self-maps of a product of balls (composition symbols).

Every symbol can be evaluated pointwise, expanded in a truncated Taylor
series about the origin (one series per output coordinate), and asked for a
sampled estimate of its sup-norm.  Symbols are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from hardycomp.hardy import DomainSpec
from hardycomp.powerseries import (
    TruncatedSeries,
    binomial_series,
    div,
    substitute,
)

VALIDATION_SAMPLES = 1000
SUP_SAMPLES = 4096


class UnsupportedDomainError(ValueError):
    pass


class FixedPointError(ValueError):
    """The symbol does not fix the origin."""


@dataclass(frozen=True)
class SupNormEstimate:
    """Sampled value of sup_z ||phi(z)||_Omega (a lower estimate when sampled)."""

    value: float
    samples: int

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class JacobianInfo:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    truly_d_dimensional: bool


@lru_cache(maxsize=128)
def lens_series(theta: float, cap: int) -> TruncatedSeries:
    """One-variable Taylor series of the lens map of parameter ``theta``."""
    plus = binomial_series(theta, 1, cap)
    minus = binomial_series(theta, -1, cap)
    return div(plus - minus, plus + minus)


def lens_eval(theta, z):
    z = np.asarray(z, dtype=complex)
    a = (1 + z) ** theta
    b = (1 - z) ** theta
    return (a - b) / (a + b)


def moebius(w, z):
    """Coordinatewise disk involution exchanging 0 and ``w``."""
    w = np.asarray(w, dtype=complex)
    z = np.asarray(z, dtype=complex)
    return (w - z) / (1 - np.conj(w) * z)


def taylor_by_fft(func, dim: int, cap: int, radius: float = 0.7) -> list[TruncatedSeries]:
    """Taylor coefficients from samples on the torus of the given radius.

    Used for symbols whose expansion cannot be produced by exact series
    arithmetic (compositions with automorphisms moving the origin).
    """
    m = 128
    while m < 4 * (cap + 1):
        m *= 2
    t = np.exp(2j * np.pi * np.arange(m) / m) * radius
    mesh = np.stack(np.meshgrid(*([t] * dim), indexing="ij"), axis=-1)
    values = np.asarray(func(mesh))
    powers = radius ** -np.arange(cap + 1, dtype=float)
    scale = powers
    for _ in range(dim - 1):
        scale = np.multiply.outer(scale, powers)
    out = []
    for j in range(dim):
        c = np.fft.fftn(values[..., j]) / m**dim
        c = c[(slice(0, cap + 1),) * dim] * scale
        out.append(TruncatedSeries.from_grid(c, cap))
    return out


class Symbol:
    """Base class.  Subclasses implement ``eval``, ``_taylor`` and ``to_spec``."""

    bounded = True

    def __init__(self, dom: DomainSpec, validate: bool = True, rng=0):
        self.dom = dom
        self._taylor_cache: dict[int, list[TruncatedSeries]] = {}
        if validate:
            self._validate(rng)

    @property
    def dim(self) -> int:
        return self.dom.dim

    def _validate(self, rng) -> None:
        pts = self.dom.random_interior(VALIDATION_SAMPLES, rng)
        img = self.eval(pts)
        if not np.all(np.isfinite(img)):
            raise OverflowError(f"{self!r} produced non-finite values")
        if not np.all(self.dom.norm(img) < 1.0):
            raise ValueError(f"{self!r} does not map the domain into itself")

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z) -> np.ndarray:
        raise NotImplementedError

    def taylor(self, cap: int) -> list[TruncatedSeries]:
        """Coordinate series of the symbol about 0, truncated at ``cap``."""
        if cap < 1:
            raise ValueError("taylor cap must be >= 1")
        if cap not in self._taylor_cache:
            self._taylor_cache[cap] = self._taylor(cap)
        return self._taylor_cache[cap]

    def _taylor(self, cap):
        raise NotImplementedError

    def sup_norm_estimate(self, rng=0) -> SupNormEstimate:
        pts = self.dom.random_boundary(SUP_SAMPLES, rng) * (1 - 1e-12)
        val = float(np.max(self.dom.norm(self.eval(pts))))
        return SupNormEstimate(min(1.0, val), SUP_SAMPLES)

    def to_spec(self) -> dict:
        raise NotImplementedError


class Identity(Symbol):
    def __init__(self, dom: DomainSpec):
        super().__init__(dom, validate=False)

    def eval(self, z):
        return np.asarray(z, dtype=complex).copy()

    def _taylor(self, cap):
        return [TruncatedSeries.variable(self.dim, cap, j) for j in range(self.dim)]

    def sup_norm_estimate(self, rng=0):
        return SupNormEstimate(1.0, 0)

    def to_spec(self):
        return {"type": "identity"}

    def __repr__(self):
        return f"Identity({self.dom.blocks})"


class Lens(Symbol):
    """Multi-lens map ``z_j -> lambda_{theta_j}(z_j)`` on the polydisk."""

    def __init__(self, thetas, dom: DomainSpec | None = None, validate=True, rng=0):
        self.thetas = tuple(float(t) for t in np.atleast_1d(thetas))
        if not all(0 < t < 1 for t in self.thetas):
            raise ValueError(f"lens parameters must lie in (0, 1), got {self.thetas}")
        dom = dom or DomainSpec.polydisk(len(self.thetas))
        if dom.dim != len(self.thetas):
            raise ValueError("one lens parameter per coordinate")
        super().__init__(dom, validate, rng)

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        return np.stack([lens_eval(t, z[..., j]) for j, t in enumerate(self.thetas)], axis=-1)

    def _taylor(self, cap):
        return [TruncatedSeries.from_univariate(lens_series(t, cap).coeffs, self.dim, j)
                for j, t in enumerate(self.thetas)]

    def sup_norm_estimate(self, rng=0):
        t = np.exp(2j * np.pi * np.arange(SUP_SAMPLES) / SUP_SAMPLES)
        per_coord = [np.max(np.abs(lens_eval(th, t))) for th in self.thetas]
        if self.dom.is_polydisk:
            return SupNormEstimate(min(1.0, float(max(per_coord))), SUP_SAMPLES)
        return super().sup_norm_estimate(rng)

    def to_spec(self):
        return {"type": "lens", "theta": list(self.thetas)}

    def __repr__(self):
        return f"Lens({self.thetas})"


class DiagonalLinear(Symbol):
    def __init__(self, r, dom: DomainSpec | None = None, validate=True, rng=0):
        self.r = np.atleast_1d(np.asarray(r, dtype=complex))
        self.r.setflags(write=False)
        if not np.all(np.abs(self.r) < 1):
            raise ValueError("diagonal entries must have modulus < 1")
        dom = dom or DomainSpec.polydisk(len(self.r))
        if dom.dim != len(self.r):
            raise ValueError("one diagonal entry per coordinate")
        super().__init__(dom, validate, rng)

    def eval(self, z):
        return np.asarray(z, dtype=complex) * self.r

    def _taylor(self, cap):
        return [TruncatedSeries.variable(self.dim, cap, j, r) for j, r in enumerate(self.r)]

    def sup_norm_estimate(self, rng=0):
        return SupNormEstimate(float(np.max(np.abs(self.r))), 0)

    def to_spec(self):
        return {"type": "diag", "r": [_num(x) for x in self.r]}

    def __repr__(self):
        return f"DiagonalLinear({[_num(x) for x in self.r]})"


class Linear(Symbol):
    """``z -> A z``; the Omega-operator norm of A is checked to be < 1 by sampling."""

    def __init__(self, A, dom: DomainSpec | None = None, validate=True, rng=0):
        self.A = np.asarray(A, dtype=complex)
        self.A.setflags(write=False)
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise ValueError("A must be a square matrix")
        dom = dom or DomainSpec.polydisk(self.A.shape[0])
        if dom.dim != self.A.shape[0]:
            raise ValueError("matrix size does not match the domain")
        Symbol.__init__(self, dom, validate=False)
        if validate:
            if self.sup_norm_estimate(rng).value >= 1.0:
                raise ValueError("linear symbol must have operator norm < 1 on the domain")
            self._validate(rng)

    def eval(self, z):
        return np.asarray(z, dtype=complex) @ self.A.T

    def _taylor(self, cap):
        d = self.dim
        out = []
        for j in range(d):
            s = TruncatedSeries(d, cap)
            for k in range(d):
                if self.A[j, k] != 0:
                    s = s + TruncatedSeries.variable(d, cap, k, self.A[j, k])
            out.append(s)
        return out

    def sup_norm_estimate(self, rng=0):
        pts = self.dom.random_boundary(SUP_SAMPLES, rng)
        val = float(np.max(self.dom.norm(self.eval(pts))))
        return SupNormEstimate(val, SUP_SAMPLES)

    def to_spec(self):
        spec = {"type": "linear", "matrix": self.A.real.tolist()}
        if np.any(self.A.imag):
            spec["matrix_imag"] = self.A.imag.tolist()
        return spec

    def __repr__(self):
        return f"Linear({self.A.tolist()})"


class Scale(Symbol):
    def __init__(self, s: float, inner: Symbol, validate=True, rng=0):
        if not 0 < s <= 1:
            raise ValueError("scale factor must lie in (0, 1]")
        self.s = float(s)
        self.inner = inner
        super().__init__(inner.dom, validate, rng)

    def eval(self, z):
        return self.s * self.inner.eval(z)

    def _taylor(self, cap):
        return [self.s * c for c in self.inner.taylor(cap)]

    def sup_norm_estimate(self, rng=0):
        est = self.inner.sup_norm_estimate(rng)
        return SupNormEstimate(min(1.0, self.s * est.value), est.samples)

    def to_spec(self):
        return {"type": "scale", "s": self.s, "inner": self.inner.to_spec()}

    def __repr__(self):
        return f"Scale({self.s}, {self.inner!r})"


class Compose(Symbol):
    """``outer o inner``."""

    def __init__(self, outer: Symbol, inner: Symbol, validate=True, rng=0):
        if outer.dom != inner.dom:
            raise ValueError("composed symbols must act on the same domain")
        self.outer = outer
        self.inner = inner
        self.bounded = outer.bounded and inner.bounded
        super().__init__(inner.dom, validate and self.bounded, rng)

    def eval(self, z):
        return self.outer.eval(self.inner.eval(z))

    def _taylor(self, cap):
        zero = np.zeros(self.dim, dtype=complex)
        if np.max(np.abs(self.inner.eval(zero))) <= 1e-12:
            inner = self.inner.taylor(cap)
            return [substitute(o, inner) for o in self.outer.taylor(cap)]
        return taylor_by_fft(self.eval, self.dim, cap)

    def to_spec(self):
        return {"type": "compose", "outer": self.outer.to_spec(), "inner": self.inner.to_spec()}

    def __repr__(self):
        return f"Compose({self.outer!r}, {self.inner!r})"


class Duplicate(Symbol):
    """``(z1, z2) -> (z1, z1)`` on the bidisk: a Schur map with unbounded C_phi."""

    bounded = False

    def __init__(self):
        super().__init__(DomainSpec.polydisk(2), validate=False)

    def eval(self, z):
        z = np.asarray(z, dtype=complex)
        return np.stack([z[..., 0], z[..., 0]], axis=-1)

    def _taylor(self, cap):
        v = TruncatedSeries.variable(2, cap, 0)
        return [v, v]

    def to_spec(self):
        return {"type": "duplicate"}

    def __repr__(self):
        return "Duplicate()"


class MoebiusConjugate(Symbol):
    """``Phi_{phi(a)} o phi o Phi_a`` on the polydisk; fixes the origin."""

    def __init__(self, a, inner: Symbol, validate=True, rng=0):
        if not inner.dom.is_polydisk:
            raise UnsupportedDomainError("Moebius conjugation is implemented for the polydisk only")
        self.a = np.asarray(a, dtype=complex).reshape(inner.dim)
        inner.dom.check_interior(self.a)
        self.a.setflags(write=False)
        self.inner = inner
        self.image = np.asarray(inner.eval(self.a), dtype=complex)
        self.image.setflags(write=False)
        super().__init__(inner.dom, validate and inner.bounded, rng)

    def eval(self, z):
        return moebius(self.image, self.inner.eval(moebius(self.a, z)))

    def _taylor(self, cap):
        return taylor_by_fft(self.eval, self.dim, cap)

    def to_spec(self):
        spec = {"type": "moebius", "point": self.a.real.tolist(), "inner": self.inner.to_spec()}
        if np.any(self.a.imag):
            spec["point_imag"] = self.a.imag.tolist()
        return spec

    def __repr__(self):
        return f"MoebiusConjugate({self.a.tolist()}, {self.inner!r})"


def _num(x):
    x = complex(x)
    return x.real if x.imag == 0 else [x.real, x.imag]


def jacobian_at_zero(phi: Symbol, tol: float = 1e-12) -> JacobianInfo:
    """Derivative of ``phi`` at 0 together with its eigenvalues.

    Raises :class:`FixedPointError` unless ``phi(0) = 0``; conjugate with
    :func:`moebius_fix_origin` first.
    """
    zero = np.zeros(phi.dim, dtype=complex)
    if np.max(np.abs(phi.eval(zero))) > tol:
        raise FixedPointError("phi(0) != 0; conjugate the symbol to fix the origin first")
    series = phi.taylor(1)
    J = np.array([[s.coeffs[1 + k] for k in range(phi.dim)] for s in series])
    eig = np.linalg.eigvals(J)
    eig = eig[np.argsort(-np.abs(eig), kind="stable")]
    smin = np.linalg.svd(J, compute_uv=False).min()
    return JacobianInfo(J, eig, bool(smin > 1e-10))


def moebius_fix_origin(phi: Symbol, a) -> Symbol:
    """A symbol with the same decay class as ``phi`` that fixes 0.

    For ``a = 0`` with ``phi(0) = 0`` the symbol itself is returned.
    """
    if not phi.dom.is_polydisk:
        raise UnsupportedDomainError("only polydisk automorphisms are available")
    a = np.asarray(a, dtype=complex).reshape(phi.dim)
    if not np.any(a) and np.max(np.abs(phi.eval(a))) <= 1e-12:
        return phi
    return MoebiusConjugate(a, phi)


def from_spec(doc: dict, rng=0) -> Symbol:
    """Build a symbol from the JSON-style document ``{"domain": ..., "symbol": ...}``."""
    dom = DomainSpec(tuple(doc["domain"]["blocks"]))
    return _build(doc["symbol"], dom, rng)


def _complex_list(node, key):
    re = np.asarray(node[key], dtype=float)
    im = node.get(key + "_imag")
    return re + 1j * np.asarray(im, dtype=float) if im is not None else re.astype(complex)


def _build(node: dict, dom: DomainSpec, rng) -> Symbol:
    kind = node["type"]
    if kind == "identity":
        return Identity(dom)
    if kind == "lens":
        theta = node["theta"]
        if np.isscalar(theta):
            theta = [theta] * dom.dim
        return Lens(theta, dom, rng=rng)
    if kind == "diag":
        r = node["r"]
        if np.isscalar(r):
            r = [r] * dom.dim
        r = [complex(*x) if isinstance(x, list) else complex(x) for x in r]
        return DiagonalLinear(r, dom, rng=rng)
    if kind == "linear":
        return Linear(_complex_list(node, "matrix"), dom, rng=rng)
    if kind == "scale":
        return Scale(node["s"], _build(node["inner"], dom, rng), rng=rng)
    if kind == "compose":
        return Compose(_build(node["outer"], dom, rng), _build(node["inner"], dom, rng), rng=rng)
    if kind == "duplicate":
        if dom.blocks != (1, 1):
            raise UnsupportedDomainError("the duplicate map lives on the bidisk")
        return Duplicate()
    if kind == "moebius":
        return MoebiusConjugate(_complex_list(node, "point"), _build(node["inner"], dom, rng), rng=rng)
    raise ValueError(f"unknown symbol type {kind!r}")


def to_document(phi: Symbol) -> dict:
    return {"domain": {"blocks": list(phi.dom.blocks)}, "symbol": phi.to_spec()}
