"""Absolute summability indices as ledgers, and the hypothesis checks.

The mean ``t_n`` that appears in every hypothesis is the (C,1) mean of
``(n a_n)``: ``t_n = (1/(n+1)) sum_{v=1}^{n} v a_v``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError
from .matrices import (
    LD,
    TriangularMethod,
    binomial_coefficients,
    delta_transform_values,
    general_cesaro_method,
    riesz_mean_values,
)
from .numerics import CompensatedSum, abs_pow, compensated_cumsum
from .sequences import (
    CONSISTENT,
    DEFAULT_THRESHOLDS,
    DIVERGING,
    GrowthReport,
    LazySequence,
    Thresholds,
    WeightSystem,
    _derived,
    almost_increasing_diagnostic,
    forward_difference,
    partial_sums,
    quasi_f_power_check,
    second_difference,
    termwise,
)

CSV_VERSION = "abssum-csv v1"

# condition identifiers used in hypothesis ledgers and CSV exports
FACTOR_MAJORANT = "factor-times-majorant"  # lambda_m X_m = O(1)
SECOND_DIFFERENCE = "second-difference-sum"  # sum n X_n |D^2 lambda_n| = O(1)
WEIGHT_GROWTH = "weight-growth"  # sum P_n / n = O(P_m)
WEIGHTED_T = "weighted-t-sum"  # sum (p_n/P_n)|t_n|^k = O(X_m)
HARMONIC_T = "harmonic-t-sum"  # sum |t_n|^k / n = O(X_m)
WEIGHTED_T_X = "weighted-t-sum-over-X"  # sum (p_n/P_n)|t_n|^k / X_n^{k-1} = O(X_m)
HARMONIC_T_X = "harmonic-t-sum-over-X"  # sum |t_n|^k / (n X_n^{k-1}) = O(X_m)
LEMMA_POINTWISE = "lemma-pointwise"  # n X_n |D lambda_n| = O(1)
LEMMA_SUM = "lemma-sum"  # sum X_n |D lambda_n| < inf
MAJORANT_CLASS = "majorant-class"

VARIANTS = ("almost-increasing", "quasi-sigma", "quasi-f")


def _require_k(k: float) -> float:
    if not k >= 1:
        raise DomainError(f"k must satisfy k >= 1, got {k}")
    return float(k)


@dataclass(frozen=True)
class SummabilityLedger:
    """Per-index terms of an absolute summability index and their running sums."""

    method_tag: str
    k: float
    indices: np.ndarray
    terms: np.ndarray
    partials: np.ndarray
    extra: dict = field(default_factory=dict, compare=False)

    @classmethod
    def build(cls, method_tag: str, k: float, indices, terms, **extra) -> "SummabilityLedger":
        terms = np.asarray(terms, dtype=float)
        if np.any(terms < 0):
            raise DomainError("ledger terms must be non-negative")
        return cls(method_tag, float(k), np.asarray(indices, dtype=int), terms,
                   compensated_cumsum(terms), extra)

    @property
    def N(self) -> int:
        return int(self.indices[-1]) if len(self.indices) else 0

    @property
    def total(self) -> float:
        return float(self.partials[-1]) if len(self.partials) else 0.0

    def report(self, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> GrowthReport:
        """Grade the flattening of the partial sums."""
        return GrowthReport.from_history(f"sum of {self.method_tag} terms < inf", self.indices,
                                         self.partials, thresholds)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(f"# {CSV_VERSION} ledger method={self.method_tag} k={self.k!r} N={self.N}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "term", "partial_sum"])
            for n, t, s in zip(self.indices.tolist(), self.terms.tolist(), self.partials.tolist()):
                w.writerow([n, repr(t), repr(s)])


@dataclass(frozen=True)
class HypothesisLedger:
    """One growth report per checked condition; overall verdict is their conjunction."""

    reports: dict

    @property
    def verdict(self) -> str:
        if all(r.verdict == CONSISTENT for r in self.reports.values()):
            return CONSISTENT
        if any(r.verdict == DIVERGING for r in self.reports.values()):
            return DIVERGING
        return "inconclusive"

    @property
    def passed(self) -> bool:
        return self.verdict == CONSISTENT

    def __getitem__(self, key: str) -> GrowthReport:
        return self.reports[key]

    def __contains__(self, key: str) -> bool:
        return key in self.reports

    def failures(self) -> list[str]:
        return [cid for cid, r in self.reports.items() if r.verdict != CONSISTENT]

    def merged(self, other: "HypothesisLedger | dict") -> "HypothesisLedger":
        extra = other.reports if isinstance(other, HypothesisLedger) else other
        return HypothesisLedger({**self.reports, **extra})

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(f"# {CSV_VERSION} hypotheses\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["condition_id", "sup_ratio", "argmax_index", "tail_slope", "verdict"])
            for cid, r in self.reports.items():
                w.writerow([cid, repr(r.sup_ratio), r.argmax_index, repr(r.tail_slope), r.verdict])


# ------------------------------------------------------------- (C,1) mean


def cesaro_one_mean(a: LazySequence) -> LazySequence:
    """``t_n = (1/(n+1)) sum_{v=1}^{n} v a_v``, maintained as a compensated running sum."""
    acc = CompensatedSum()

    def block(lo, hi):
        vals = a.values(hi)
        out = np.empty(hi - lo + 1)
        for i, n in enumerate(range(lo, hi + 1)):
            acc.add(n * vals[n])
            out[i] = acc.value / (n + 1)
        return out

    return _derived(block, 0, f"t[{a.name}]")


def invert_cesaro_one_mean(t: LazySequence) -> LazySequence:
    """Series with prescribed (C,1) mean: ``n a_n = (n+1) t_n - n t_{n-1}``.

    ``t_0`` must vanish because ``t_0 = 0 * a_0``; the series starts at 1.
    """
    if t.start == 0 and t[0] != 0:
        raise DomainError("t_0 must be 0 for a (C,1) mean of (n a_n)", 0)

    def block(lo, hi):
        tv = t.values(hi)
        n = np.arange(lo, hi + 1, dtype=float)
        prev = tv[lo - 1 : hi] if lo >= 1 else np.concatenate(([0.0], tv[: hi]))
        return ((n + 1) * tv[lo : hi + 1] - n * prev) / n

    return _derived(block, 1, f"inv[{t.name}]")


def factored_series(a: LazySequence, lam: LazySequence) -> LazySequence:
    """Termwise product ``a_n lambda_n``."""
    return termwise(lambda x, y: x * y, a, lam, name=f"{a.name}*{lam.name}")


# ---------------------------------------------------------------- indices


def index_cesaro(a: LazySequence, alpha: float, k: float, N: int) -> SummabilityLedger:
    """``|C,alpha|_k`` terms ``(1/n)|t_n^alpha|^k`` for ``n = 1..N``.

    The equivalent form ``n^{k-1}|u_n - u_{n-1}|^k`` is computed alongside
    from the companion of the Cesaro matrix (``extra['difference_terms']``).
    """
    k = _require_k(k)
    if alpha <= -1:
        raise DomainError(f"Cesaro order must exceed -1, got {alpha}")
    low = binomial_coefficients(alpha - 1, N)
    high = binomial_coefficients(alpha, N)
    va = np.arange(N + 1, dtype=LD) * a.values(N).astype(LD)
    rev = low[::-1]
    t = np.empty(N + 1)
    for n in range(N + 1):
        t[n] = float(np.sum(rev[N - n :] * va[: n + 1]) / high[n])
    n = np.arange(1, N + 1)
    terms = abs_pow(t[1:], k) / n
    du = delta_transform_values(general_cesaro_method(alpha), a, N)[1:]
    diff_terms = n ** (k - 1) * abs_pow(du, k)
    return SummabilityLedger.build(f"|C,{alpha:g}|_{k:g}", k, n, terms, t=t,
                                   delta_u=du, difference_terms=diff_terms)


def riesz_difference_values(a: LazySequence, w: WeightSystem, N: int) -> np.ndarray:
    """``t_n - t_{n-1}`` of the Riesz mean through
    ``p_n / (P_n P_{n-1}) * sum_{v=1}^{n} P_{v-1} a_v`` (avoids cancellation).
    Entry 0 is ``t_0``.
    """
    p = w.p_values(N)
    P = w.P_values(N)
    av = a.values(N)
    out = np.empty(N + 1)
    out[0] = av[0]
    acc = CompensatedSum()
    for n in range(1, N + 1):
        acc.add(P[n - 1] * av[n])
        out[n] = p[n] / (P[n] * P[n - 1]) * acc.value
    return out


def index_weighted(a: LazySequence, w: WeightSystem, k: float, N: int) -> SummabilityLedger:
    """``|N,p_n|_k`` terms ``(P_n/p_n)^{k-1}|t_n - t_{n-1}|^k`` for the Riesz mean."""
    k = _require_k(k)
    t = riesz_mean_values(partial_sums(a), w, N)
    dt = riesz_difference_values(a, w, N)
    p = w.p_values(N)[1:]
    P = w.P_values(N)[1:]
    terms = (P / p) ** (k - 1) * abs_pow(dt[1:], k)
    return SummabilityLedger.build(f"|N,p|_{k:g}", k, np.arange(1, N + 1), terms, t=t, delta_t=dt)


def index_matrix(
    a: LazySequence, A: TriangularMethod, w: WeightSystem, k: float, N: int
) -> SummabilityLedger:
    """``|A,p_n|_k`` terms ``(P_n/p_n)^{k-1}|Delta A_n(s)|^k`` via the ``hat`` companion."""
    k = _require_k(k)
    d = delta_transform_values(A, a, N)
    p = w.p_values(N)[1:]
    P = w.P_values(N)[1:]
    terms = (P / p) ** (k - 1) * abs_pow(d[1:], k)
    return SummabilityLedger.build(f"|{A.name},p|_{k:g}", k, np.arange(1, N + 1), terms, delta=d)


# ------------------------------------------------------------- hypotheses


def _ratio_report(claim, idx, lhs, bound, thresholds):
    ratio = lhs / bound
    return GrowthReport.from_history(claim, idx, ratio, thresholds)


def check_hypotheses(
    a: LazySequence,
    lam: LazySequence,
    X: LazySequence,
    w: WeightSystem,
    k: float,
    variant: str,
    N: int,
    sigma: float = 0.5,
    beta: float = 0.0,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
    include_lemma: bool = True,
) -> HypothesisLedger:
    """Grade the factor, majorant and weight hypotheses on ``1 <= m <= N``.

    The three shared conditions are always checked. ``variant`` picks the
    pair of t-conditions (plain sums for ``almost-increasing``, sums
    divided by ``X_n^{k-1}`` otherwise) and the class test applied to X.
    ``O(X_m)`` conditions are graded by ``LHS(m) / X_m``.
    """
    k = _require_k(k)
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}, got {variant!r}")
    m = np.arange(1, N + 1)
    lamv = lam.values(N)[1:]
    Xv = X.values(N)[1:]
    if np.any(~(Xv > 0)):
        i = int(np.nonzero(~(Xv > 0))[0][0]) + 1
        raise DomainError(f"majorant must be positive, X_{i} = {Xv[i - 1]!r}", i)
    p = w.p_values(N)[1:]
    P = w.P_values(N)[1:]
    tk = abs_pow(cesaro_one_mean(a).values(N)[1:], k)
    d2 = second_difference(lam).values(N)[1:]

    reports = {}
    reports[FACTOR_MAJORANT] = GrowthReport.from_history("lambda_m X_m = O(1)", m, lamv * Xv, thresholds)
    reports[SECOND_DIFFERENCE] = GrowthReport.from_history(
        "sum n X_n |D^2 lambda_n| = O(1)", m, compensated_cumsum(m * Xv * np.abs(d2)), thresholds)
    reports[WEIGHT_GROWTH] = _ratio_report("sum P_n/n = O(P_m)", m, compensated_cumsum(P / m), P, thresholds)
    if variant == "almost-increasing":
        reports[WEIGHTED_T] = _ratio_report(
            "sum (p_n/P_n)|t_n|^k = O(X_m)", m, compensated_cumsum(p / P * tk), Xv, thresholds)
        reports[HARMONIC_T] = _ratio_report(
            "sum |t_n|^k/n = O(X_m)", m, compensated_cumsum(tk / m), Xv, thresholds)
        reports[MAJORANT_CLASS] = almost_increasing_diagnostic(X, N, thresholds)
    else:
        Xk = Xv ** (k - 1)
        reports[WEIGHTED_T_X] = _ratio_report(
            "sum (p_n/P_n)|t_n|^k/X_n^(k-1) = O(X_m)", m, compensated_cumsum(p / P * tk / Xk), Xv, thresholds)
        reports[HARMONIC_T_X] = _ratio_report(
            "sum |t_n|^k/(n X_n^(k-1)) = O(X_m)", m, compensated_cumsum(tk / (m * Xk)), Xv, thresholds)
        b = 0.0 if variant == "quasi-sigma" else beta
        if N >= 3:
            reports[MAJORANT_CLASS] = quasi_f_power_check(X, sigma, b, N, thresholds)[1]
    if include_lemma:
        r1, r2 = check_lemma(lam, X, N, thresholds)
        reports[LEMMA_POINTWISE] = r1
        reports[LEMMA_SUM] = r2
    return HypothesisLedger(reports)


def check_lemma(
    lam: LazySequence, X: LazySequence, N: int, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> tuple[GrowthReport, GrowthReport]:
    """Reports for ``n X_n |D lambda_n| = O(1)`` and ``sum X_n |D lambda_n| < inf``."""
    n = np.arange(1, N + 1)
    Xv = X.values(N)[1:]
    d = np.abs(forward_difference(lam).values(N)[1:])
    pointwise = GrowthReport.from_history("n X_n |D lambda_n| = O(1)", n, n * Xv * d, thresholds)
    summed = GrowthReport.from_history("sum X_n |D lambda_n| < inf", n, compensated_cumsum(Xv * d), thresholds)
    return pointwise, summed
