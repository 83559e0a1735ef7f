"""Low-level numerical helpers: compensated sums, guarded powers, slopes."""

from __future__ import annotations

import math

import numpy as np


class CompensatedSum:
    """Running sum with Neumaier error feedback.

    >>> acc = CompensatedSum()
    >>> for x in (1e16, 1.0, -1e16):
    ...     acc.add(x)
    >>> acc.value
    1.0
    """

    __slots__ = ("_sum", "_comp")

    def __init__(self, start: float = 0.0):
        self._sum = float(start)
        self._comp = 0.0

    def add(self, x: float) -> None:
        x = float(x)
        t = self._sum + x
        if abs(self._sum) >= abs(x):
            self._comp += (self._sum - t) + x
        else:
            self._comp += (x - t) + self._sum
        self._sum = t

    @property
    def value(self) -> float:
        return self._sum + self._comp


def compensated_cumsum(values) -> np.ndarray:
    """Cumulative sums of ``values`` with Neumaier compensation."""
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    acc = CompensatedSum()
    for i, x in enumerate(values.tolist()):
        acc.add(x)
        out[i] = acc.value
    return out


def abs_pow(x, k: float) -> np.ndarray:
    """``|x|**k`` evaluated as ``exp(k*log|x|)``, with ``0**k = 0``."""
    ax = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(ax)
    nz = ax > 0
    if k == 1:
        out[nz] = ax[nz]
    else:
        out[nz] = np.exp(k * np.log(ax[nz]))
    return out


def loglog_slope(indices, values) -> float:
    """Least-squares slope of ``log|values|`` against ``log(indices)``.

    Only the last half of the prefix is used; zero or non-finite entries
    are dropped. Returns 0.0 when fewer than two usable points remain.
    """
    idx = np.asarray(indices, dtype=float)
    val = np.abs(np.asarray(values, dtype=float))
    half = len(idx) // 2
    idx, val = idx[half:], val[half:]
    keep = (idx > 0) & (val > 0) & np.isfinite(val)
    if keep.sum() < 2:
        return 0.0
    x = np.log(idx[keep])
    y = np.log(val[keep])
    if np.ptp(x) == 0:
        return 0.0
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


def running_max(values) -> np.ndarray:
    return np.maximum.accumulate(np.asarray(values, dtype=float))


def relative_error(x: float, y: float, scale: float = 0.0) -> float:
    """``|x - y| / max(|x|, |y|, scale)``; 0 when all three vanish."""
    den = max(abs(x), abs(y), scale)
    if den == 0:
        return 0.0
    return abs(x - y) / den


def fsum(values) -> float:
    return math.fsum(np.asarray(values, dtype=float).tolist())
