"""Decay-rate estimates from a finite sample of approximation numbers.

The liminf/limsup defining the decay class cannot be evaluated on finite
data; they are replaced by the min/max of ``log(1/a_n) / n**(1/d)`` over a
window, plus the least-squares slope of ``log(1/a_n)`` against ``n**(1/d)``.
The stretched exponent is the slope of ``log log(1/a_n)`` against ``log n``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

MIN_WINDOW = 8


@dataclass
class DecayFit:
    gamma_minus: float
    gamma_plus: float
    slope: float
    intercept: float
    residual: float
    stretch_exponent: float | None
    window: tuple[int, int]
    stretch_window: tuple[int, int] | None = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["window"] = list(self.window)
        out["stretch_window"] = list(self.stretch_window) if self.stretch_window else None
        out["proxy"] = "window min/max and regression slope stand in for liminf/limsup"
        return out


def _clean(a, notes: list[str]) -> np.ndarray:
    a = np.asarray(a, dtype=float).ravel()
    if a.size == 0:
        raise ValueError("empty sample")
    if np.any(np.isnan(a)):
        raise ValueError("sample contains NaN")
    if np.any(a[1:] > a[:-1] * (1 + 1e-12)):
        raise ValueError("approximation numbers must be non-increasing")
    nonpos = np.nonzero(a <= 0)[0]
    if nonpos.size:
        cut = int(nonpos[0])
        notes.append(f"sample truncated at n={cut}: a_{cut + 1} is zero")
        a = a[:cut]
    return a


def default_window(size: int) -> tuple[int, int]:
    """Last half of the sample with the top 10% of indices removed."""
    return size // 2 + 1, max(size // 2 + 1, (9 * size) // 10)


def _resolve_window(window, size: int, notes: list[str]) -> tuple[int, int]:
    if window is None:
        lo, hi = default_window(size)
    else:
        lo, hi = (int(w) for w in window)
        if lo < 1 or hi < lo:
            raise ValueError(f"invalid window {window!r}")
        if hi > size:
            notes.append(f"window upper end clipped from {hi} to {size}")
            hi = size
    if hi - lo + 1 < MIN_WINDOW:
        raise ValueError(f"window [{lo}, {hi}] has fewer than {MIN_WINDOW} points")
    return lo, hi


def _stretch(a: np.ndarray, lo: int, hi: int, notes: list[str]):
    n = np.arange(lo, hi + 1)
    seg = a[lo - 1:hi]
    ok = seg < 1.0
    if not np.all(ok):
        # a is non-increasing, so the offending entries sit at the front
        first = int(np.argmax(ok)) if np.any(ok) else len(seg)
        notes.append(f"stretch window shrunk: a_n >= 1 for n < {lo + first}")
        n, seg = n[first:], seg[first:]
    if len(seg) < 2:
        notes.append("stretch exponent undefined: too few points with a_n < 1")
        return None, None
    y = np.log(np.log(1.0 / seg))
    x = np.log(n.astype(float))
    nu = float(np.polyfit(x, y, 1)[0])
    return nu, (int(n[0]), int(n[-1]))


def gamma_estimate(a, d: int, window=None) -> DecayFit:
    """Windowed proxies for the decay functionals of index ``d``.

    Parameters
    ----------
    a : array_like
        Non-increasing positive approximation numbers a_1, a_2, ...
    d : int
        Dimension in the normalisation ``n**(1/d)``.
    window : (int, int), optional
        1-based inclusive index range; defaults to :func:`default_window`.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    notes: list[str] = []
    a = _clean(a, notes)
    lo, hi = _resolve_window(window, len(a), notes)
    n = np.arange(lo, hi + 1, dtype=float)
    y = np.log(1.0 / a[lo - 1:hi])
    x = n ** (1.0 / d)
    s = y / x
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    nu, swin = _stretch(a, lo, hi, notes)
    return DecayFit(
        gamma_minus=float(s.min()),
        gamma_plus=float(s.max()),
        slope=float(slope),
        intercept=float(intercept),
        residual=float(np.sqrt(np.mean(resid**2))),
        stretch_exponent=nu,
        window=(lo, hi),
        stretch_window=swin,
        notes=notes,
    )


def stretch_exponent_fit(a, window=None) -> float:
    """Slope of ``log log(1/a_n)`` against ``log n`` over the window."""
    notes: list[str] = []
    a = _clean(a, notes)
    lo, hi = _resolve_window(window, len(a), notes)
    nu, _ = _stretch(a, lo, hi, notes)
    if nu is None:
        raise ValueError("; ".join(notes))
    return nu


def lens_band(d: int) -> tuple[float, float]:
    """Exponent range ``[1/(2d+1), 1/(2d)]`` bracketing multi-lens decay."""
    return 1.0 / (2 * d + 1), 1.0 / (2 * d)
