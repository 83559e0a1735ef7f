"""Normal (lower-triangular) summability methods and their companions.

Rows are produced in extended precision (``np.longdouble``). The
series-to-series companion ``hat`` is formed as ``a_nn`` plus a suffix sum
of column differences ``a_ni - a_{n-1,i}``: subtracting two rows of the
series-to-sequence companion ``bar`` directly would cancel O(1) quantities
down to entries of size O(1/n^2) and lose most of the significant digits.
"""

from __future__ import annotations

import csv
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .errors import DomainError
from .numerics import compensated_cumsum
from .sequences import GrowthReport, LazySequence, Thresholds, DEFAULT_THRESHOLDS, WeightSystem, partial_sums

LD = np.longdouble
DEFAULT_MAX_ROWS = 20_000


@dataclass(frozen=True)
class MethodRow:
    """Row ``n`` of a method with its predecessor and both companions."""

    n: int
    a: np.ndarray
    prev: np.ndarray
    bar: np.ndarray
    hat: np.ndarray

    @property
    def column_difference(self) -> np.ndarray:
        """``a_nv - a_{n-1,v}`` for ``v < n``."""
        return self.a[: self.n] - self.prev


class TriangularMethod:
    """Lower-triangular matrix ``(a_nv)`` with non-zero diagonal.

    ``row_rule(n)`` returns the ``n + 1`` entries ``a_n0 .. a_nn``. Only the
    two most recent rows are retained unless ``cache_rows`` is set.
    """

    def __init__(
        self,
        row_rule: Callable[[int], np.ndarray],
        name: str = "custom",
        max_rows: int = DEFAULT_MAX_ROWS,
        cache_rows: bool = False,
    ):
        self._rule = row_rule
        self.name = name
        self.max_rows = max_rows
        self.cache_rows = cache_rows
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()
        self.row(0)

    def __repr__(self):
        return f"TriangularMethod({self.name!r})"

    def row(self, n: int) -> np.ndarray:
        if n < 0:
            raise IndexError("row index must be non-negative")
        cached = self._rows.get(n)
        if cached is not None:
            return cached
        if n >= self.max_rows:
            raise DomainError(f"{self.name}: row {n} exceeds the row budget {self.max_rows}", n)
        r = np.asarray(self._rule(n), dtype=LD)
        if r.shape != (n + 1,):
            raise DomainError(f"{self.name}: row {n} has shape {r.shape}, expected ({n + 1},)", n)
        if r[n] == 0:
            raise DomainError(f"{self.name}: zero diagonal entry at row {n} (method is not normal)", n)
        r.setflags(write=False)
        self._rows[n] = r
        if not self.cache_rows:
            while len(self._rows) > 2:
                self._rows.popitem(last=False)
        return r

    def entry(self, n: int, v: int) -> float:
        if v > n or v < 0:
            return 0.0
        return float(self.row(n)[v])

    def companion_row(self, n: int) -> MethodRow:
        a = self.row(n)
        bar = np.cumsum(a[::-1])[::-1]
        if n == 0:
            return MethodRow(0, a, np.zeros(0, dtype=LD), bar, a.copy())
        prev = self.row(n - 1)
        a = self.row(n)
        d = a[:n] - prev
        hat = np.empty(n + 1, dtype=LD)
        hat[n] = a[n]
        # hat_nv = a_nn + sum_{i=v}^{n-1} d_i. Short sums keep the rounding
        # error proportional to the (small) entry, so the left half is taken
        # from hat_n0 minus a prefix sum and the right half from a suffix sum.
        h = n // 2
        hat[h:n] = a[n] + np.cumsum(d[h:][::-1])[::-1]
        head = a[n] + np.sum(d)
        hat[0] = head
        hat[1:h] = head - np.cumsum(d[: h - 1])
        return MethodRow(n, a, prev, bar, hat)

    def rows(self, N: int, start: int = 0) -> Iterator[MethodRow]:
        for n in range(start, N + 1):
            yield self.companion_row(n)

    def dense(self, N: int) -> np.ndarray:
        """Dense ``(N+1) x (N+1)`` float matrix (for small N)."""
        out = np.zeros((N + 1, N + 1))
        for n in range(N + 1):
            out[n, : n + 1] = self.row(n)
        return out


def companions(A: TriangularMethod, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows ``bar_n.`` and ``hat_n.`` as float arrays of length ``n + 1``."""
    r = A.companion_row(n)
    return r.bar.astype(float), r.hat.astype(float)


def _ld(seq: LazySequence, n: int) -> np.ndarray:
    return seq.values(n).astype(LD)


def transform(A: TriangularMethod, s: LazySequence, n: int) -> float:
    """``A_n(s) = sum_v a_nv s_v``."""
    return float(np.sum(A.row(n) * _ld(s, n)))


def transform_series_form(A: TriangularMethod, a: LazySequence, n: int) -> float:
    """``A_n(s) = sum_v bar_nv a_v`` where ``s`` are the partial sums of ``a``."""
    bar = A.companion_row(n).bar
    return float(np.sum(bar * _ld(a, n)))


def delta_transform(A: TriangularMethod, a: LazySequence, n: int) -> float:
    """``A_n(s) - A_{n-1}(s) = sum_v hat_nv a_v`` (``A_0(s)`` at ``n = 0``)."""
    hat = A.companion_row(n).hat
    return float(np.sum(hat * _ld(a, n)))


def transform_values(A: TriangularMethod, s: LazySequence, N: int) -> np.ndarray:
    sv = _ld(s, N)
    return np.array([float(np.sum(A.row(n) * sv[: n + 1])) for n in range(N + 1)])


def delta_transform_values(A: TriangularMethod, a: LazySequence, N: int) -> np.ndarray:
    av = _ld(a, N)
    out = np.empty(N + 1)
    for r in A.rows(N):
        out[r.n] = float(np.sum(r.hat * av[: r.n + 1]))
    return out


def column_difference(A: TriangularMethod, n: int) -> np.ndarray:
    """Difference down the columns, ``a_nv - a_{n-1,v}`` for ``v < n``."""
    if n == 0:
        return np.zeros(0)
    return (A.row(n)[:n] - A.row(n - 1)).astype(float)


# ---------------------------------------------------------------- Cesaro


def binomial_coefficients(order: float, N: int, dtype=LD) -> np.ndarray:
    """``A_0..A_N`` of the given order via ``A_n = A_{n-1} (order + n) / n``."""
    n = np.arange(1, N + 1, dtype=dtype)
    factors = (dtype(order) + n) / n
    return np.concatenate(([dtype(1)], np.cumprod(factors))).astype(dtype)


def cesaro_coefficient(alpha: float, n: int) -> float:
    """``A_n^alpha = (alpha+1)...(alpha+n)/n!``, zero for negative ``n``."""
    if alpha <= -1:
        raise DomainError(f"Cesaro order must exceed -1, got {alpha}")
    if n < 0:
        return 0.0
    c = 1.0
    for j in range(1, n + 1):
        c = c * (alpha + j) / j
    return c


def _cesaro_table(alpha: float):
    """Growing longdouble tables of ``A^{alpha-1}`` and ``A^alpha``."""
    state = {"N": -1, "low": None, "high": None}

    def get(n):
        if n > state["N"]:
            M = max(2 * state["N"], n, 64)
            state["low"] = binomial_coefficients(alpha - 1, M)
            state["high"] = binomial_coefficients(alpha, M)
            state["N"] = M
        return state["low"], state["high"]

    return get


def cesaro_means(a: LazySequence, alpha: float, n: int) -> tuple[float, float]:
    """``(u_n, t_n)``: order-``alpha`` means of ``s_n`` and of ``n a_n``."""
    if alpha <= -1:
        raise DomainError(f"Cesaro order must exceed -1, got {alpha}")
    low = binomial_coefficients(alpha - 1, n)
    high = binomial_coefficients(alpha, n)
    kern = low[: n + 1][::-1]
    s = _ld(partial_sums(a), n)
    va = np.arange(n + 1, dtype=LD) * _ld(a, n)
    return float(np.sum(kern * s) / high[n]), float(np.sum(kern * va) / high[n])


def cesaro_mean_values(a: LazySequence, alpha: float, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``u_0..u_N`` and ``t_0..t_N`` (quadratic cost)."""
    if alpha <= -1:
        raise DomainError(f"Cesaro order must exceed -1, got {alpha}")
    low = binomial_coefficients(alpha - 1, N)
    high = binomial_coefficients(alpha, N)
    s = _ld(partial_sums(a), N)
    va = np.arange(N + 1, dtype=LD) * _ld(a, N)
    rev = low[::-1]
    u = np.empty(N + 1)
    t = np.empty(N + 1)
    for n in range(N + 1):
        kern = rev[N - n :]
        u[n] = float(np.sum(kern * s[: n + 1]) / high[n])
        t[n] = float(np.sum(kern * va[: n + 1]) / high[n])
    return u, t


# ----------------------------------------------------------------- Riesz


def riesz_mean_values(s: LazySequence, w: WeightSystem, N: int) -> np.ndarray:
    """``t_n = (1/P_n) sum_{v<=n} p_v s_v`` for ``n = 0..N``."""
    num = compensated_cumsum(w.p_values(N) * s.values(N))
    return num / w.P_values(N)


def riesz_mean(s: LazySequence, w: WeightSystem, n: int) -> float:
    return float(riesz_mean_values(s, w, n)[n])


# ------------------------------------------------------------- factories


def identity_method() -> TriangularMethod:
    def rule(n):
        r = np.zeros(n + 1, dtype=LD)
        r[n] = 1
        return r

    return TriangularMethod(rule, "identity")


def weighted_mean_method(w: WeightSystem) -> TriangularMethod:
    """``a_nv = p_v / P_n``; totals are re-accumulated in extended precision."""
    state = {"P": np.zeros(0, dtype=LD), "p": np.zeros(0, dtype=LD)}

    def rule(n):
        if n >= len(state["P"]):
            M = max(2 * len(state["P"]), n + 1, 64)
            state["p"] = w.p_values(M - 1).astype(LD)
            state["P"] = np.cumsum(state["p"])
        return state["p"][: n + 1] / state["P"][n]

    return TriangularMethod(rule, "weighted_mean")


def _cesaro_rule(alpha: float):
    table = _cesaro_table(alpha)

    def rule(n):
        low, high = table(n)
        return low[: n + 1][::-1] / high[n]

    return rule


def cesaro_method(alpha: float) -> TriangularMethod:
    """``a_nv = A_{n-v}^{alpha-1} / A_n^alpha`` for ``0 < alpha <= 1``."""
    if not 0 < alpha <= 1:
        raise DomainError(f"cesaro_method requires 0 < alpha <= 1, got {alpha}")
    return TriangularMethod(_cesaro_rule(alpha), f"cesaro({alpha:g})")


def general_cesaro_method(alpha: float) -> TriangularMethod:
    """Cesaro matrix for any order ``alpha > -1`` (may violate monotonicity)."""
    if alpha <= -1:
        raise DomainError(f"Cesaro order must exceed -1, got {alpha}")
    return TriangularMethod(_cesaro_rule(alpha), f"cesaro({alpha:g})")


def dense_method(matrix, name: str = "dense") -> TriangularMethod:
    """Method backed by an explicit square lower-triangular array."""
    m = np.asarray(matrix, dtype=LD)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("dense method needs a square matrix")
    if np.any(np.triu(m, 1) != 0):
        raise DomainError("dense method must be lower triangular")
    return TriangularMethod(lambda n: m[n, : n + 1], name, max_rows=m.shape[0])


def custom_method(path: str | Path) -> TriangularMethod:
    """Read a CSV of dense lower-triangular rows.

    Row ``n`` may list either its ``n + 1`` leading entries or a full-width
    row padded with zeros. Lines starting with ``#`` are skipped.
    """
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            rows.append([float(x) for x in rec if x.strip() != ""])
    size = len(rows)
    m = np.zeros((size, size))
    for n, r in enumerate(rows):
        if len(r) < n + 1 or any(x != 0 for x in r[n + 1 :]):
            raise DomainError(f"{path}: row {n} is not lower triangular", n)
        m[n, : n + 1] = r[: n + 1]
    return dense_method(m, f"custom({path})")


def random_method(seed: int, normalized: bool = True) -> TriangularMethod:
    """Deterministic pseudo-random positive method; row ``n`` is seeded by ``(seed, n)``."""

    def rule(n):
        rng = np.random.default_rng([seed, n])
        r = rng.uniform(0.5, 1.5, n + 1).astype(LD)
        return r / np.sum(r) if normalized else r

    return TriangularMethod(rule, f"random({seed})")


def head_heavy_method() -> TriangularMethod:
    """Row sums 1 but ``a_n0 = n/(n+1)`` grows with n, so columns are not monotone."""

    def rule(n):
        if n == 0:
            return np.ones(1, dtype=LD)
        r = np.full(n + 1, LD(1) / (LD(n) * (n + 1)), dtype=LD)
        r[0] = LD(n) / (n + 1)
        return r

    return TriangularMethod(rule, "head_heavy")


# ------------------------------------------------------------ conditions

ROW_SUM_ONE = "row-sum-one"
COLUMN_MONOTONE = "column-monotone"
DIAGONAL_WEIGHT = "diagonal-vs-weight"
HAT_COLUMN_SUM = "hat-harmonic-sum"


def check_matrix_conditions(
    A: TriangularMethod,
    w: WeightSystem,
    N: int,
    tol: float = 1e-12,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> list[GrowthReport]:
    """Four reports on the method hypotheses, in this order:

    * ``bar_n0 = 1`` on every row (tolerance ``tol``);
    * ``a_{n-1,v} >= a_nv`` for ``v < n`` (non-strict, exact comparison);
    * ``a_nn = O(p_n / P_n)`` graded by ``a_nn P_n / p_n``;
    * ``sum_{v=1}^{n-1} hat_{n,v+1} / v = O(a_nn)`` graded by the ratio.

    Violations are recorded in the reports, never raised.
    """
    if N < 2:
        raise DomainError("N must be at least 2")
    p = w.p_values(N)
    P = w.P_values(N)
    dev = np.empty(N + 1)
    mono = np.full(N + 1, -np.inf)
    diag = np.empty(N + 1)
    hat_ratio = np.zeros(N + 1)
    for r in A.rows(N):
        n = r.n
        dev[n] = abs(float(r.bar[0]) - 1.0)
        ann = float(r.a[n])
        diag[n] = ann * P[n] / p[n]
        if n >= 1:
            mono[n] = float(np.max(r.a[:n] - r.prev))
        if n >= 2:
            v = np.arange(1, n, dtype=LD)
            hat_ratio[n] = float(np.sum(r.hat[2 : n + 1] / v)) / ann
    i = int(np.argmax(dev))
    rep_sum = GrowthReport.exact("bar_n0 = 1 for every row", bool(dev.max() <= tol), dev[i], i,
                                 tolerance=tol)
    j = int(np.argmax(mono))
    worst = float(mono[j])
    rep_mono = GrowthReport.exact("a_{n-1,v} >= a_nv for n >= v+1", worst <= 0, max(worst, 0.0), j,
                                  worst_violation=max(worst, 0.0), violating_rows=int(np.sum(mono > 0)))
    idx = np.arange(N + 1)
    rep_diag = GrowthReport.from_history("a_nn = O(p_n/P_n)", idx, diag, thresholds)
    rep_hat = GrowthReport.from_history("sum_{v<n} hat_{n,v+1}/v = O(a_nn)", idx[2:], hat_ratio[2:], thresholds)
    return [rep_sum, rep_mono, rep_diag, rep_hat]
