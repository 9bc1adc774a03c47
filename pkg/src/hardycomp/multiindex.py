"""Multi-indices in N^d and their graded lexicographic ordering.

The canonical basis order used everywhere in the package: ascending total
degree, and inside one degree the lexicographically *largest* exponent tuple
first, so for d = 2 the order is (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
Homogeneous layers are contiguous blocks of ranks.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

# Largest list we are willing to materialise.
MAX_ENUMERATION = sys.maxsize // 64


class IndexOverflowError(OverflowError):
    """Raised when an index set is too large to be addressed."""


@dataclass(frozen=True, order=False)
class MultiIndex:
    """Exponent tuple ``alpha`` with cached total degree ``|alpha|``."""

    exponents: tuple[int, ...]
    degree: int = field(init=False, compare=False)

    def __post_init__(self):
        exps = tuple(int(e) for e in self.exponents)
        if len(exps) < 1:
            raise ValueError("a multi-index needs at least one component")
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in {exps}")
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "degree", sum(exps))

    @property
    def dim(self) -> int:
        return len(self.exponents)

    def __len__(self):
        return len(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def __getitem__(self, i):
        return self.exponents[i]

    def __repr__(self):
        return f"MultiIndex{self.exponents}"

    @classmethod
    def _trusted(cls, exps: tuple, degree: int) -> MultiIndex:
        # rows of an exponent table are already validated
        obj = object.__new__(cls)
        object.__setattr__(obj, "exponents", exps)
        object.__setattr__(obj, "degree", degree)
        return obj


def _check_dim(d: int) -> None:
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")


def count_upto(d: int, p: int) -> int:
    """Number of multi-indices in N^d with total degree <= p, i.e. C(d+p, d)."""
    _check_dim(d)
    if p < 0:
        raise ValueError(f"degree must be >= 0, got {p}")
    return comb(d + p, d)


def count_exact(d: int, k: int) -> int:
    """Number of multi-indices in N^d with total degree exactly k."""
    _check_dim(d)
    if k < 0:
        raise ValueError(f"degree must be >= 0, got {k}")
    return comb(k + d - 1, d - 1)


@lru_cache(maxsize=512)
def _layer(d: int, k: int) -> np.ndarray:
    # all d-tuples summing to k, lexicographically descending
    if d == 1:
        return np.array([[k]], dtype=np.int64)
    parts = []
    for first in range(k, -1, -1):
        rest = _layer(d - 1, k - first)
        parts.append(np.hstack([np.full((len(rest), 1), first, dtype=np.int64), rest]))
    out = np.vstack(parts)
    out.setflags(write=False)
    return out


def _table(d: int, p: int) -> np.ndarray:
    n = count_upto(d, p)
    if n > MAX_ENUMERATION:
        raise IndexOverflowError(f"{n} multi-indices exceed the addressable range")
    out = np.vstack([_layer(d, k) for k in range(p + 1)])
    out.setflags(write=False)
    return out


_cached_table = lru_cache(maxsize=128)(_table)


def exponent_table(d: int, p: int) -> np.ndarray:
    """Read-only int array of shape (count_upto(d, p), d), rows in rank order."""
    _check_dim(d)
    if p < 0:
        raise ValueError(f"degree must be >= 0, got {p}")
    if count_upto(d, p) <= 200_000:
        return _cached_table(d, p)
    return _table(d, p)


def enumerate_upto(d: int, p: int) -> list[MultiIndex]:
    """All alpha with |alpha| <= p in graded lexicographic order."""
    table = exponent_table(d, p)
    make = MultiIndex._trusted
    return [make(tuple(row), deg) for row, deg in zip(table.tolist(), table.sum(axis=1).tolist())]


def rank(alpha) -> int:
    """Position of ``alpha`` in the graded lexicographic enumeration."""
    exps = alpha.exponents if isinstance(alpha, MultiIndex) else tuple(alpha)
    d = len(exps)
    _check_dim(d)
    k = sum(exps)
    r = count_upto(d, k - 1) if k > 0 else 0
    remaining = k
    for i, e in enumerate(exps[:-1]):
        # tuples of the same degree that beat alpha at coordinate i
        for v in range(remaining, e, -1):
            r += count_exact(d - i - 1, remaining - v)
        remaining -= e
    return r


def unrank(d: int, i: int) -> MultiIndex:
    """Inverse of :func:`rank`."""
    _check_dim(d)
    if i < 0 or i > MAX_ENUMERATION:
        raise IndexError(f"rank {i} out of range")
    k = 0
    while count_upto(d, k) <= i:
        k += 1
    offset = i - (count_upto(d, k - 1) if k > 0 else 0)
    exps = []
    remaining = k
    for pos in range(d - 1):
        for v in range(remaining, -1, -1):
            block = count_exact(d - pos - 1, remaining - v)
            if offset < block:
                exps.append(v)
                remaining -= v
                break
            offset -= block
    exps.append(remaining)
    return MultiIndex(tuple(exps))


def degree_slices(d: int, p: int) -> list[slice]:
    """Rank ranges of the homogeneous layers 0..p."""
    out = []
    start = 0
    for k in range(p + 1):
        stop = start + count_exact(d, k)
        out.append(slice(start, stop))
        start = stop
    return out
