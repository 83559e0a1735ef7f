"""Abel-transformed split of the factored transform into four pieces.

For the factored series ``a_n lambda_n`` (summed from ``n = 1``) and a
method ``A``,

    Delta I_n = sum_{v=1}^{n} hat_nv a_v lambda_v = I1 + I2 + I3 + I4

with ``t`` the (C,1) mean of ``(n a_n)`` and ``d_nv = a_nv - a_{n-1,v}``:

    I1 = sum_{v=1}^{n-1} d_nv lambda_v t_v (v+1)/v
    I2 = sum_{v=1}^{n-1} hat_{n,v+1} (lambda_v - lambda_{v+1}) t_v (v+1)/v
    I3 = sum_{v=1}^{n-1} hat_{n,v+1} lambda_{v+1} t_v / v
    I4 = a_nn lambda_n t_n (n+1)/n
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .matrices import LD, MethodRow, TriangularMethod
from .numerics import abs_pow
from .sequences import DEFAULT_THRESHOLDS, GrowthReport, LazySequence, Thresholds, WeightSystem
from .summability import CSV_VERSION, SummabilityLedger, cesaro_one_mean


@dataclass(frozen=True)
class DecompositionRow:
    n: int
    delta_I: float
    I1: float
    I2: float
    I3: float
    I4: float

    @property
    def residual(self) -> float:
        return self.delta_I - (self.I1 + self.I2 + self.I3 + self.I4)

    @property
    def pieces(self) -> tuple[float, float, float, float]:
        return self.I1, self.I2, self.I3, self.I4


class _Inputs:
    """Extended-precision prefixes shared by all rows up to ``N``."""

    def __init__(self, a: LazySequence, lam: LazySequence, N: int):
        self.N = N
        self.a = a.values(N).astype(LD)
        self.lam = lam.values(N + 1).astype(LD)
        self.t = cesaro_one_mean(a).values(N).astype(LD)
        v = np.arange(N + 1, dtype=LD)
        v[0] = 1  # index 0 never enters a sum
        self.up = (v + 1) / v
        self.inv = 1 / v


def _row(r: MethodRow, x: _Inputs) -> DecompositionRow:
    n = r.n
    a, lam, t = x.a, x.lam, x.t
    delta_I = np.sum(r.hat[1 : n + 1] * a[1 : n + 1] * lam[1 : n + 1])
    if n >= 2:
        v = slice(1, n)
        hat_next = r.hat[2 : n + 1]
        d = r.a[1:n] - r.prev[1:n]
        I1 = np.sum(d * lam[v] * t[v] * x.up[v])
        I2 = np.sum(hat_next * (lam[v] - lam[2 : n + 1]) * t[v] * x.up[v])
        I3 = np.sum(hat_next * lam[2 : n + 1] * t[v] * x.inv[v])
    else:
        I1 = I2 = I3 = LD(0)
    I4 = r.a[n] * lam[n] * t[n] * x.up[n]
    return DecompositionRow(n, float(delta_I), float(I1), float(I2), float(I3), float(I4))


def decompose(A: TriangularMethod, a: LazySequence, lam: LazySequence, n: int) -> DecompositionRow:
    """Single row ``n >= 1`` of the decomposition."""
    if n < 1:
        raise ValueError("decomposition rows start at n = 1")
    return _row(A.companion_row(n), _Inputs(a, lam, n))


def iter_decomposition(
    A: TriangularMethod, a: LazySequence, lam: LazySequence, N: int
) -> Iterator[DecompositionRow]:
    x = _Inputs(a, lam, N)
    for r in A.rows(N, start=1):
        yield _row(r, x)


@dataclass(frozen=True)
class DecompositionTable:
    """Column arrays for rows ``n = 1..N``."""

    n: np.ndarray
    delta_I: np.ndarray
    I: np.ndarray  # shape (N, 4)

    @property
    def residual(self) -> np.ndarray:
        return self.delta_I - self.I.sum(axis=1)

    def max_scaled_residual(self) -> float:
        """``max |residual| / max(1, |delta_I|)`` over all rows."""
        return float(np.max(np.abs(self.residual) / np.maximum(1.0, np.abs(self.delta_I))))

    def rows(self) -> Iterator[DecompositionRow]:
        for i in range(len(self.n)):
            yield DecompositionRow(int(self.n[i]), float(self.delta_I[i]), *map(float, self.I[i]))

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(f"# {CSV_VERSION} decomposition\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "delta_I", "I1", "I2", "I3", "I4", "residual"])
            for row in self.rows():
                w.writerow([row.n, repr(row.delta_I), *map(repr, row.pieces), repr(row.residual)])


def decomposition_table(A: TriangularMethod, a: LazySequence, lam: LazySequence, N: int) -> DecompositionTable:
    rows = list(iter_decomposition(A, a, lam, N))
    return DecompositionTable(
        np.array([r.n for r in rows]),
        np.array([r.delta_I for r in rows]),
        np.array([r.pieces for r in rows]).reshape(len(rows), 4),
    )


def bounded_sums(
    A: TriangularMethod,
    a: LazySequence,
    lam: LazySequence,
    w: WeightSystem,
    k: float,
    N: int,
    table: DecompositionTable | None = None,
) -> tuple[list[SummabilityLedger], SummabilityLedger]:
    """Ledgers of ``(P_n/p_n)^{k-1}|I_r|^k`` for r = 1..4, plus the total ledger.

    The total uses ``delta_I`` itself; termwise it never exceeds
    ``4^{k-1}`` times the sum of the four piece terms.
    """
    if table is None:
        table = decomposition_table(A, a, lam, N)
    n = table.n
    factor = (w.P_values(N)[1:] / w.p_values(N)[1:]) ** (k - 1)
    pieces = [
        SummabilityLedger.build(f"I{r + 1}", k, n, factor * abs_pow(table.I[:, r], k))
        for r in range(4)
    ]
    total = SummabilityLedger.build(f"|{A.name},p|_{k:g}", k, n, factor * abs_pow(table.delta_I, k))
    return pieces, total


def domination_gap(pieces: list[SummabilityLedger], total: SummabilityLedger) -> np.ndarray:
    """``4^{k-1} sum_r term_r - total_term`` per row; non-negative when the bound holds."""
    k = total.k
    return 4 ** (k - 1) * sum(p.terms for p in pieces) - total.terms


def column_difference_checks(
    A: TriangularMethod, N: int, tol: float = 1e-13
) -> tuple[GrowthReport, GrowthReport]:
    """Check ``hat_nv - hat_{n,v+1} = a_nv - a_{n-1,v}`` and the two variation bounds.

    First report: worst absolute deviation in the identity over ``v < n <= N``.
    Second report: the row bound ``sum_{v=1}^{n-1} |d_nv| <= a_nn`` and the
    column bound ``sum_{n=v+1}^{N} |d_nv| <= a_vv``; ``detail`` holds the
    worst slack of each (negative means violated) and the column sums of
    ``hat_{n,v+1}`` for inspection.
    """
    worst_id, worst_id_at = 0.0, 0
    row_slack = np.full(N + 1, np.inf)
    col_abs = np.zeros(N + 1, dtype=LD)
    hat_cols = np.zeros(N + 1, dtype=LD)
    diag = np.zeros(N + 1, dtype=LD)
    for r in A.rows(N):
        n = r.n
        diag[n] = r.a[n]
        if n == 0:
            continue
        d = r.a[:n] - r.prev
        dhat = r.hat[:n] - r.hat[1 : n + 1]
        dev = float(np.max(np.abs(dhat - d)))
        if dev > worst_id:
            worst_id, worst_id_at = dev, n
        row_slack[n] = float(r.a[n] - np.sum(np.abs(d[1:])))
        col_abs[:n] += np.abs(d)
        hat_cols[: n] += r.hat[1 : n + 1]
    col_slack = (diag - col_abs).astype(float)[1:N]
    identity = GrowthReport.exact(
        "hat_nv - hat_{n,v+1} = a_nv - a_{n-1,v}", worst_id <= tol, worst_id, worst_id_at, tolerance=tol)
    i = int(np.argmin(row_slack))
    j = int(np.argmin(col_slack)) + 1 if len(col_slack) else 0
    worst_row = float(row_slack[i])
    worst_col = float(col_slack[j - 1]) if len(col_slack) else 0.0
    holds = worst_row >= 0 and worst_col >= 0
    bounds = GrowthReport.exact(
        "sum_v |a_nv - a_{n-1,v}| <= a_nn and sum_n |a_nv - a_{n-1,v}| <= a_vv",
        holds,
        min(worst_row, worst_col),
        i if worst_row <= worst_col else j,
        row_slack=worst_row,
        row_slack_index=i,
        column_slack=worst_col,
        column_slack_index=j,
        row_slacks=row_slack[1:],
        hat_column_sums=hat_cols.astype(float),
    )
    return identity, bounds


def bounded_sums_reports(
    pieces: list[SummabilityLedger], total: SummabilityLedger, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> dict[str, GrowthReport]:
    out = {f"I{r + 1}-sum": p.report(thresholds) for r, p in enumerate(pieces)}
    out["total-sum"] = total.report(thresholds)
    return out
