"""Truncated multivariate power series with complex coefficients.

A :class:`TruncatedSeries` stores the Taylor coefficients of a polynomial in
``dim`` variables of total degree at most ``cap``.  Coefficients live in a
flat array ordered by multi-index rank (see :mod:`hardycomp.multiindex`);
products are computed on a dense ``(cap+1)**dim`` grid and truncated back.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from hardycomp.multiindex import MultiIndex, count_upto, exponent_table, rank


class SingularDivisionError(ZeroDivisionError):
    """Denominator series has a (numerically) vanishing constant term."""


class SeriesMismatchError(ValueError):
    """Operands disagree on dimension or truncation degree."""


DIV_TOL = 1e-14


@lru_cache(maxsize=64)
def _grid_index(dim: int, cap: int):
    exps = exponent_table(dim, cap)
    return tuple(exps.T)


@lru_cache(maxsize=64)
def _total_degree_mask(dim: int, cap: int) -> np.ndarray:
    grids = np.indices((cap + 1,) * dim).sum(axis=0)
    mask = grids <= cap
    mask.setflags(write=False)
    return mask


def grid_mul(a: np.ndarray, b: np.ndarray, keep: np.ndarray | None = None) -> np.ndarray:
    """Truncated product of two coefficient grids of identical shape.

    Entries outside the grid are dropped; ``keep`` (boolean, same shape)
    additionally zeroes entries outside the retained index set.
    """
    if a.shape != b.shape:
        raise SeriesMismatchError(f"grid shapes {a.shape} and {b.shape} differ")
    if a.ndim == 1:
        out = np.convolve(a, b)[: a.shape[0]]
        return out if keep is None else np.where(keep, out, 0)
    # shift-and-add over the sparser operand
    if np.count_nonzero(b) > np.count_nonzero(a):
        a, b = b, a
    out = np.zeros(a.shape, dtype=np.result_type(a, b))
    shape = a.shape
    for idx in zip(*np.nonzero(b)):
        dst = tuple(slice(i, n) for i, n in zip(idx, shape))
        src = tuple(slice(0, n - i) for i, n in zip(idx, shape))
        out[dst] += b[idx] * a[src]
    if keep is not None:
        out[~keep] = 0
    return out


class TruncatedSeries:
    """Dense truncated power series in ``dim`` variables up to degree ``cap``."""

    __slots__ = ("dim", "cap", "coeffs")

    def __init__(self, dim: int, cap: int, coeffs=None):
        if dim < 1 or cap < 0:
            raise ValueError(f"invalid series shape dim={dim}, cap={cap}")
        n = count_upto(dim, cap)
        if coeffs is None:
            coeffs = np.zeros(n, dtype=complex)
        else:
            coeffs = np.asarray(coeffs, dtype=complex).copy()
            if coeffs.shape != (n,):
                raise SeriesMismatchError(f"expected {n} coefficients, got {coeffs.shape}")
        coeffs.setflags(write=False)
        self.dim = dim
        self.cap = cap
        self.coeffs = coeffs

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, dim: int, cap: int, value: complex = 1.0) -> TruncatedSeries:
        c = np.zeros(count_upto(dim, cap), dtype=complex)
        c[0] = value
        return cls(dim, cap, c)

    @classmethod
    def variable(cls, dim: int, cap: int, j: int, scale: complex = 1.0) -> TruncatedSeries:
        """The series ``scale * z_j``."""
        if cap < 1:
            return cls(dim, cap)
        c = np.zeros(count_upto(dim, cap), dtype=complex)
        c[1 + j] = scale
        return cls(dim, cap, c)

    @classmethod
    def from_univariate(cls, coeffs, dim: int, var: int, cap: int | None = None) -> TruncatedSeries:
        """Embed a one-variable series ``sum c_k w^k`` as a series in ``z_var``."""
        coeffs = np.asarray(coeffs, dtype=complex)
        if cap is None:
            cap = len(coeffs) - 1
        grid = np.zeros((cap + 1,) * dim, dtype=complex)
        m = min(cap + 1, len(coeffs))
        idx = [0] * dim
        idx[var] = slice(0, m)
        grid[tuple(idx)] = coeffs[:m]
        return cls.from_grid(grid, cap)

    @classmethod
    def from_grid(cls, grid: np.ndarray, cap: int) -> TruncatedSeries:
        dim = grid.ndim
        return cls(dim, cap, grid[_grid_index(dim, cap)])

    # -- views --------------------------------------------------------------

    def to_grid(self) -> np.ndarray:
        grid = np.zeros((self.cap + 1,) * self.dim, dtype=complex)
        grid[_grid_index(self.dim, self.cap)] = self.coeffs
        return grid

    def coeff(self, alpha) -> complex:
        if isinstance(alpha, MultiIndex):
            alpha = alpha.exponents
        if len(alpha) != self.dim:
            raise SeriesMismatchError("multi-index dimension mismatch")
        if sum(alpha) > self.cap:
            return 0j
        return complex(self.coeffs[rank(alpha)])

    def truncate(self, cap: int) -> TruncatedSeries:
        if cap > self.cap:
            raise SeriesMismatchError("cannot raise the truncation degree")
        return TruncatedSeries(self.dim, cap, self.coeffs[: count_upto(self.dim, cap)])

    def __call__(self, z) -> np.ndarray:
        """Evaluate the polynomial at points ``z`` of shape (..., dim)."""
        z = np.asarray(z, dtype=complex)
        exps = exponent_table(self.dim, self.cap)
        monomials = np.prod(z[..., None, :] ** exps, axis=-1)
        return monomials @ self.coeffs

    # -- arithmetic --------------------------------------------------------------

    def _check(self, other: TruncatedSeries) -> None:
        if self.dim != other.dim or self.cap != other.cap:
            raise SeriesMismatchError(
                f"series ({self.dim}, {self.cap}) vs ({other.dim}, {other.cap})")

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return TruncatedSeries(self.dim, self.cap, self.coeffs + other.coeffs)
        c = self.coeffs.copy()
        c[0] += other
        return TruncatedSeries(self.dim, self.cap, c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.dim, self.cap, -self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, other)
        return TruncatedSeries(self.dim, self.cap, self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return div(self, other)
        return TruncatedSeries(self.dim, self.cap, self.coeffs / other)

    def __pow__(self, k: int):
        return power(self, k)

    def __repr__(self):
        return f"TruncatedSeries(dim={self.dim}, cap={self.cap}, nnz={np.count_nonzero(self.coeffs)})"


def binomial_series(theta: float, sign: int, cap: int) -> TruncatedSeries:
    """Taylor coefficients of ``(1 + sign*z)**theta`` up to degree ``cap``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if cap < 0:
        raise ValueError("cap must be >= 0")
    c = np.empty(cap + 1, dtype=complex)
    c[0] = 1.0
    for k in range(1, cap + 1):
        c[k] = c[k - 1] * sign * (theta - k + 1) / k
    if not np.all(np.isfinite(c)):
        raise OverflowError("binomial series coefficients overflowed")
    return TruncatedSeries(1, cap, c)


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at the common degree cap."""
    a._check(b)
    if a.dim == 1:
        return TruncatedSeries(1, a.cap, np.convolve(a.coeffs, b.coeffs)[: a.cap + 1])
    grid = grid_mul(a.to_grid(), b.to_grid(), _total_degree_mask(a.dim, a.cap))
    return TruncatedSeries.from_grid(grid, a.cap)


def power(a: TruncatedSeries, k: int) -> TruncatedSeries:
    """``a**k`` by binary exponentiation."""
    if k < 0:
        raise ValueError("negative powers are not supported; use div")
    result = TruncatedSeries.constant(a.dim, a.cap)
    base = a
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def div(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Quotient ``q`` with ``q*b = a`` up to degree cap."""
    a._check(b)
    b0 = b.coeffs[0]
    if abs(b0) <= DIV_TOL:
        raise SingularDivisionError(f"denominator constant term {b0!r} is too close to zero")
    if a.dim == 1:
        av, bv = a.coeffs, b.coeffs
        q = np.zeros(a.cap + 1, dtype=complex)
        for k in range(a.cap + 1):
            q[k] = (av[k] - np.dot(bv[1:k + 1], q[k - 1::-1][:k])) / b0 if k else av[0] / b0
        return TruncatedSeries(1, a.cap, q)
    # degree k of q is exact after k+1 sweeps since (b - b0) has no constant term
    tail = b - b0
    q = a / b0
    for _ in range(a.cap):
        q = (a - mul(tail, q)) / b0
    return q


def compose1d(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """Coefficients of ``outer(inner(z))`` for one-variable series."""
    outer._check(inner)
    if outer.dim != 1:
        raise SeriesMismatchError("compose1d handles one-variable series only")
    if inner.coeffs[0] != 0:
        raise ValueError("inner series must vanish at 0 for truncated composition")
    result = TruncatedSeries.constant(1, outer.cap, outer.coeffs[-1])
    for c in outer.coeffs[-2::-1]:
        result = mul(result, inner) + c
    return result


def tensor_power(factors, alpha, cap: int | None = None) -> TruncatedSeries:
    """``prod_j factors[j]**alpha[j]`` truncated at ``cap``."""
    exps = alpha.exponents if isinstance(alpha, MultiIndex) else tuple(alpha)
    if len(exps) != len(factors):
        raise SeriesMismatchError("need one factor per exponent")
    dim = factors[0].dim
    if cap is None:
        cap = factors[0].cap
    for f in factors:
        if f.dim != dim:
            raise SeriesMismatchError("factors must share a dimension")
        if f.cap < cap:
            raise SeriesMismatchError(f"factor cap {f.cap} below requested cap {cap}")
    result = TruncatedSeries.constant(dim, cap)
    for f, e in zip(factors, exps):
        if e:
            ft = f if f.cap == cap else f.truncate(cap)
            result = mul(result, power(ft, e))
    return result


def power_grids(factor_grids, exps: np.ndarray, keep: np.ndarray | None = None):
    """Yield the coefficient grid of ``prod_j f_j**alpha_j`` for each row of ``exps``.

    ``exps`` must be sorted by total degree and closed under decreasing any
    exponent (true for total-degree and box index sets).  Only the previous
    degree layer is kept in memory.
    """
    shape = factor_grids[0].shape
    prev: dict = {}
    cur: dict = {}
    level = 0
    for row in exps:
        alpha = tuple(int(e) for e in row)
        deg = sum(alpha)
        if deg != level:
            if deg != level + 1 and deg != 0:
                raise ValueError("exponents must be sorted by total degree")
            prev, cur, level = cur, {}, deg
        if deg == 0:
            grid = np.zeros(shape, dtype=complex)
            grid[(0,) * len(shape)] = 1.0
        else:
            j = next(i for i, e in enumerate(alpha) if e)
            parent = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
            grid = grid_mul(prev[parent], factor_grids[j], keep)
        cur[alpha] = grid
        yield grid


def substitute(outer: TruncatedSeries, inner) -> TruncatedSeries:
    """``outer(inner_1, ..., inner_m)`` where every inner series vanishes at 0."""
    if len(inner) != outer.dim:
        raise SeriesMismatchError("need one inner series per outer variable")
    dim, cap = inner[0].dim, inner[0].cap
    for s in inner:
        if s.dim != dim or s.cap != cap:
            raise SeriesMismatchError("inner series must share dimension and cap")
        if abs(s.coeffs[0]) > 1e-12:
            raise ValueError("inner series must vanish at 0 for truncated substitution")
    exps = exponent_table(outer.dim, min(outer.cap, cap))
    grids = [s.to_grid() for s in inner]
    keep = _total_degree_mask(dim, cap)
    acc = np.zeros((cap + 1,) * dim, dtype=complex)
    for c, g in zip(outer.coeffs, power_grids(grids, exps, keep)):
        if c != 0:
            acc += c * g
    return TruncatedSeries.from_grid(acc, cap)
