"""Galerkin compressions P_p C_phi P_p and their singular values.

Rows and columns are indexed by multi-index rank in the orthonormal basis
``z^alpha / ||z^alpha||``.  Column ``alpha`` holds the Taylor coefficients of
``phi**alpha`` (degree <= p), rescaled by the monomial norms.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from hardycomp.hardy import DomainSpec, log_monomial_norm_sq
from hardycomp.multiindex import count_upto, exponent_table
from hardycomp.powerseries import _total_degree_mask, power_grids, tensor_power
from hardycomp.symbols import Symbol, to_document

DEFAULT_MAX_BASIS = 5000
CONVERGENCE_RTOL = 1e-6


class UnboundedSymbolError(ValueError):
    """The symbol does not induce a bounded composition operator."""


class BasisTooLargeError(MemoryError):
    pass


@dataclass
class CompressionMatrix:
    dom: DomainSpec
    p: int
    entries: np.ndarray
    symbol: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def singular_values(self) -> np.ndarray:
        return singular_values(self)


@dataclass
class ApproxResult:
    """Compressed approximation numbers plus convergence diagnostics vs. p - 2."""

    values: np.ndarray
    p: int
    previous: np.ndarray | None
    interlacing_ok: bool
    max_gap: float
    converged: np.ndarray

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)


def _check_symbol(phi: Symbol, dom: DomainSpec | None) -> DomainSpec:
    if not phi.bounded:
        raise UnboundedSymbolError(
            f"{phi!r} does not induce a bounded operator; see unboundedness_witness")
    dom = dom or phi.dom
    if dom != phi.dom:
        raise ValueError(f"symbol acts on {phi.dom.blocks}, not on {dom.blocks}")
    return dom


def assemble(phi: Symbol, dom: DomainSpec | None = None, p: int = 10, jobs: int = 1,
             max_basis: int = DEFAULT_MAX_BASIS) -> CompressionMatrix:
    """Matrix of the compression of C_phi to polynomials of degree <= p."""
    dom = _check_symbol(phi, dom)
    if p < 1:
        raise ValueError("truncation degree must be >= 1")
    d = dom.dim
    n = count_upto(d, p)
    if n > max_basis:
        raise BasisTooLargeError(
            f"{n} basis elements exceed the limit {max_basis} "
            f"(~{16 * n * n / 1e6:.0f} MB); raise max_basis to override")
    exps = exponent_table(d, p)
    series = phi.taylor(p)
    lognorm = 0.5 * log_monomial_norm_sq(dom, exps)
    entries = np.empty((n, n), dtype=complex)
    if jobs <= 1:
        index = tuple(exps.T)
        grids = [s.to_grid() for s in series]
        keep = _total_degree_mask(d, p)
        for i, g in enumerate(power_grids(grids, exps, keep)):
            entries[:, i] = g[index]
    else:
        def column(i):
            return tensor_power(series, exps[i], p).coeffs
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for i, col in enumerate(pool.map(column, range(n))):
                entries[:, i] = col
    entries *= np.exp(lognorm[:, None] - lognorm[None, :])
    if not np.all(np.isfinite(entries)):
        raise FloatingPointError("non-finite entries in the compression matrix")
    return CompressionMatrix(dom, p, entries, to_document(phi))


def singular_values(M) -> np.ndarray:
    """All singular values in non-increasing order."""
    A = M.entries if isinstance(M, CompressionMatrix) else np.asarray(M)
    s = scipy.linalg.svdvals(A, check_finite=True)
    return np.sort(s)[::-1]


def approx_numbers(phi: Symbol, dom: DomainSpec | None = None, p: int = 10, jobs: int = 1,
                   max_basis: int = DEFAULT_MAX_BASIS) -> ApproxResult:
    """Singular values ``a_n^{(p)}`` of the compression, compared with degree p - 2."""
    M = assemble(phi, dom, p, jobs, max_basis)
    values = singular_values(M)
    if p < 3:
        return ApproxResult(values, p, None, True, float("nan"), np.zeros(0, dtype=bool))
    m = count_upto(M.dom.dim, p - 2)
    # the degree p-2 compression is the leading principal block
    previous = singular_values(M.entries[:m, :m])
    gap = values[:m] - previous
    scale = values[0] if len(values) else 1.0
    interlacing_ok = bool(np.all(gap >= -1e-12 * scale))
    converged = np.abs(gap) < CONVERGENCE_RTOL * scale
    return ApproxResult(values, p, previous, interlacing_ok, float(np.max(np.abs(gap))), converged)


def _box_exponents(d: int, p: int) -> np.ndarray:
    exps = np.indices((p + 1,) * d).reshape(d, -1).T
    order = np.argsort(exps.sum(axis=1), kind="stable")
    return exps[order]


def hs_norm_sq(phi: Symbol, dom: DomainSpec | None = None, p: int = 10,
               index_set: str = "total") -> float:
    """Squared Frobenius norm of the compression.

    ``index_set="total"`` uses |alpha| <= p; ``"box"`` uses max_j alpha_j <= p,
    the truncation under which the norm of a tensor-product symbol factorises.
    """
    dom = _check_symbol(phi, dom)
    d = dom.dim
    if index_set == "total":
        cap = p
        exps = exponent_table(d, p)
        keep = _total_degree_mask(d, p)
    elif index_set == "box":
        cap = d * p
        exps = _box_exponents(d, p)
        keep = None
    else:
        raise ValueError(f"unknown index set {index_set!r}")
    series = phi.taylor(cap)
    box = (slice(0, p + 1),) * d
    grids = [s.to_grid()[box] for s in series]
    grid_logw = log_monomial_norm_sq(dom, np.moveaxis(np.indices((p + 1,) * d), 0, -1))
    if keep is None:
        weights = np.exp(grid_logw)
    else:
        weights = np.where(keep, np.exp(np.where(keep, grid_logw, 0.0)), 0.0)
    col_logw = log_monomial_norm_sq(dom, exps)
    total = 0.0
    for g, lw in zip(power_grids(grids, exps, keep), col_logw):
        total += float(np.sum(np.abs(g) ** 2 * weights)) * math.exp(-lw)
    return total


def unboundedness_witness(n: int) -> float:
    """``||C_phi f|| / ||f||`` for phi = (z1, z1) and f = (z1 + z2)**n on the bidisk.

    Equals ``2**n / sqrt(C(2n, n))``, growing like ``(pi n)**(1/4)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.exp(n * math.log(2.0) - 0.5 * math.log(math.comb(2 * n, n)))


def export_matrix(M: CompressionMatrix, path) -> tuple[Path, Path]:
    """Write ``<path>.bin`` (row-major little-endian complex128) and ``<path>.json``."""
    path = Path(path)
    bin_path = path.with_suffix(".bin")
    header_path = path.with_suffix(".json")
    header = {
        "d": M.dom.dim,
        "p": M.p,
        "blocks": list(M.dom.blocks),
        "symbol": M.symbol,
        "rows": M.size,
        "cols": M.size,
        "dtype": "complex128",
        "byteorder": "little",
        "order": "row-major",
    }
    bin_path.write_bytes(np.ascontiguousarray(M.entries, dtype="<c16").tobytes())
    header_path.write_text(json.dumps(header, indent=2) + "\n")
    return bin_path, header_path


def load_matrix(path) -> CompressionMatrix:
    path = Path(path)
    header = json.loads(path.with_suffix(".json").read_text())
    raw = np.frombuffer(path.with_suffix(".bin").read_bytes(), dtype="<c16")
    entries = raw.reshape(header["rows"], header["cols"]).astype(complex)
    return CompressionMatrix(DomainSpec(tuple(header["blocks"])), header["p"], entries,
                             header.get("symbol", {}))
