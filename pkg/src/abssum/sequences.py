"""Lazy real sequences, difference operators, weights and growth diagnostics.

Every sequence is addressed by absolute index ``n``. A sequence declares
its ``start`` index; array views (:meth:`LazySequence.values`) pad the
indices below ``start`` with zeros so that sums written from ``n = 1`` map
directly onto 0-based storage.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .numerics import CompensatedSum, compensated_cumsum, loglog_slope, running_max

CONSISTENT = "consistent-with-bounded"
DIVERGING = "diverging"
INCONCLUSIVE = "inconclusive"
VERDICTS = (CONSISTENT, DIVERGING, INCONCLUSIVE)


@dataclass(frozen=True)
class Thresholds:
    """Cut-offs applied to a report's tail slope."""

    consistent: float = 0.02
    diverging: float = 0.1
    almost_increasing_floor: float = 1e-3


DEFAULT_THRESHOLDS = Thresholds()


def grade(tail_slope: float, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> str:
    if tail_slope < thresholds.consistent:
        return CONSISTENT
    if tail_slope > thresholds.diverging:
        return DIVERGING
    return INCONCLUSIVE


@dataclass(frozen=True)
class GrowthReport:
    """Finite-prefix evidence for a boundedness or ``O(.)`` claim.

    ``history`` holds the graded quantity per index (running sup of a
    ratio, or partial sums of a non-negative series); ``detail`` carries
    check-specific extras such as a worst violation.
    """

    claim: str
    sup_ratio: float
    argmax_index: int
    tail_slope: float
    verdict: str
    indices: np.ndarray = field(default=None, repr=False, compare=False)
    history: np.ndarray = field(default=None, repr=False, compare=False)
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def bounded(self) -> bool:
        return self.verdict == CONSISTENT

    @classmethod
    def from_history(
        cls,
        claim: str,
        indices,
        quantity,
        thresholds: Thresholds = DEFAULT_THRESHOLDS,
        **detail,
    ) -> "GrowthReport":
        """Grade ``quantity`` through the running sup of its magnitude."""
        indices = np.asarray(indices, dtype=int)
        quantity = np.abs(np.asarray(quantity, dtype=float))
        if len(quantity) == 0:
            return cls(claim, 0.0, 0, 0.0, INCONCLUSIVE, indices, quantity, detail)
        sup_hist = running_max(quantity)
        j = int(np.argmax(quantity))
        slope = loglog_slope(indices, sup_hist)
        return cls(
            claim,
            float(quantity[j]),
            int(indices[j]),
            slope,
            grade(slope, thresholds),
            indices,
            sup_hist,
            detail,
        )

    @classmethod
    def exact(cls, claim: str, holds: bool, worst: float, worst_index: int, **detail):
        """Report for a pointwise (non-asymptotic) condition.

        A violated condition is reported with verdict ``diverging``.
        """
        detail["holds"] = bool(holds)
        return cls(
            claim,
            float(abs(worst)),
            int(worst_index),
            0.0,
            CONSISTENT if holds else DIVERGING,
            detail=detail,
        )


class LazySequence:
    """Index-addressable real sequence with memoised, in-order evaluation.

    ``rule`` maps an index to a value. With ``vectorized=True`` it receives
    an integer array and must return an array of the same length. Forcing
    index ``n`` evaluates exactly the missing indices ``start..n`` in
    increasing order, which lets derived sequences keep running state.
    """

    def __init__(
        self,
        rule: Callable,
        start: int = 0,
        name: str | None = None,
        vectorized: bool = False,
        limit: int | None = None,
    ):
        if start < 0:
            raise ValueError("start index must be non-negative")
        self.start = int(start)
        self.name = name or getattr(rule, "__name__", "seq")
        self.limit = limit
        self._rule = rule
        self._vectorized = vectorized
        self._buf = np.zeros(max(self.start + 16, 64))
        self._hi = self.start - 1  # last forced index
        self._lock = threading.Lock()

    def __repr__(self):
        return f"LazySequence({self.name!r}, start={self.start}, forced={self._hi})"

    @classmethod
    def from_values(cls, values, start: int = 0, name: str = "table") -> "LazySequence":
        """Finite table; ``values[i]`` is the term at index ``start + i``."""
        table = np.asarray(values, dtype=float).copy()
        seq = cls(lambda idx: table[idx - start], start, name, vectorized=True,
                  limit=start + len(table) - 1)
        return seq

    @classmethod
    def from_function(cls, func, start: int = 0, name: str | None = None) -> "LazySequence":
        """Vectorised numpy function of the index array."""
        return cls(func, start, name, vectorized=True)

    @classmethod
    def constant(cls, c: float, start: int = 0) -> "LazySequence":
        return cls(lambda idx: np.full(len(idx), float(c)), start, f"const({c})", vectorized=True)

    @property
    def forced(self) -> int:
        return self._hi

    def force(self, n: int) -> None:
        if n <= self._hi:
            return
        if self.limit is not None and n > self.limit:
            raise IndexError(f"{self.name}: index {n} beyond table end {self.limit}")
        with self._lock:
            if n <= self._hi:
                return
            lo = self._hi + 1
            if n >= len(self._buf):
                new = np.zeros(max(2 * len(self._buf), n + 1))
                new[: len(self._buf)] = self._buf
                self._buf = new
            if self._vectorized:
                block = np.asarray(self._rule(np.arange(lo, n + 1)), dtype=float)
                if block.shape != (n + 1 - lo,):
                    block = np.broadcast_to(block, (n + 1 - lo,))
                self._buf[lo : n + 1] = block
            else:
                for i in range(lo, n + 1):
                    self._buf[i] = float(self._rule(i))
            self._hi = n

    def __getitem__(self, n: int) -> float:
        n = int(n)
        if n < self.start:
            raise IndexError(f"{self.name}: index {n} below start index {self.start}")
        self.force(n)
        return float(self._buf[n])

    def values(self, stop: int) -> np.ndarray:
        """Read-only array of the terms at indices ``0..stop`` (zeros below start)."""
        if stop >= self.start:
            self.force(stop)
        out = self._buf[: stop + 1].copy()
        out[: min(self.start, stop + 1)] = 0.0
        return out

    def at(self, n: int) -> float:
        """Value at ``n`` with zero below the start index."""
        return self[n] if n >= self.start else 0.0


def _derived(block: Callable[[int, int], np.ndarray], start: int, name: str) -> LazySequence:
    """Sequence whose rule fills the contiguous block ``lo..hi``."""

    def rule(idx):
        return block(int(idx[0]), int(idx[-1]))

    return LazySequence(rule, start, name, vectorized=True)


def termwise(func: Callable, *seqs: LazySequence, name: str = "termwise") -> LazySequence:
    """Pointwise combination ``func(x_n, y_n, ...)`` of aligned sequences."""
    start = max(s.start for s in seqs)

    def block(lo, hi):
        cols = [s.values(hi)[lo : hi + 1] for s in seqs]
        return func(*cols)

    return _derived(block, start, name)


def partial_sums(a: LazySequence) -> LazySequence:
    """``s_n = sum_{v <= n} a_v`` with compensated accumulation."""
    acc = CompensatedSum()

    def block(lo, hi):
        terms = a.values(hi)[lo : hi + 1]
        out = np.empty(len(terms))
        for i, x in enumerate(terms.tolist()):
            acc.add(x)
            out[i] = acc.value
        return out

    return _derived(block, a.start, f"S[{a.name}]")


def forward_difference(lam: LazySequence) -> LazySequence:
    """``(D lam)_n = lam_n - lam_{n+1}``; forcing index n forces ``lam_{n+1}``."""

    def block(lo, hi):
        v = lam.values(hi + 1)
        return v[lo : hi + 1] - v[lo + 1 : hi + 2]

    return _derived(block, lam.start, f"D[{lam.name}]")


def second_difference(lam: LazySequence) -> LazySequence:
    return forward_difference(forward_difference(lam))


def bounded_variation_diagnostic(
    lam: LazySequence, N: int, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> GrowthReport:
    """Partial sums of ``sum |D lam_n|`` over ``start <= n <= N``."""
    if N < 2:
        raise DomainError("N must be at least 2")
    d = forward_difference(lam).values(N)
    idx = np.arange(lam.start, N + 1)
    sums = compensated_cumsum(np.abs(d[lam.start :]))
    rep = GrowthReport.from_history(
        "sum |D lambda_n| < inf", idx, sums, thresholds,
        total=float(sums[-1]) if len(sums) else 0.0,
    )
    return rep


def f_power(n, sigma: float, beta: float) -> np.ndarray:
    """``n**sigma * (log n)**beta`` with natural log."""
    n = np.asarray(n, dtype=float)
    out = n**sigma
    if beta != 0:
        out = out * np.log(n) ** beta
    return out


def _positive_prefix(X: LazySequence, lo: int, N: int) -> np.ndarray:
    vals = X.values(N)[lo:]
    bad = np.nonzero(~(vals > 0))[0]
    if len(bad):
        i = lo + int(bad[0])
        raise DomainError(f"{X.name}: non-positive value {vals[bad[0]]!r} at index {i}", i)
    return vals


def quasi_f_history(X: LazySequence, sigma: float, beta: float, N: int) -> np.ndarray:
    """Running ``K(n) = max_{2 <= m <= j <= n} g_m / g_j`` with ``g = f X``.

    Entry ``i`` corresponds to ``n = i + 2``. One pass with a running
    prefix maximum of ``g``.
    """
    g = f_power(np.arange(2, N + 1), sigma, beta) * _positive_prefix(X, 2, N)
    prefix = np.maximum.accumulate(g)
    return np.maximum.accumulate(prefix / g)


def quasi_f_power_check(
    X: LazySequence,
    sigma: float,
    beta: float,
    N: int,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
) -> tuple[float, GrowthReport]:
    """Smallest admissible constant K for ``K f_n X_n >= f_m X_m`` on ``2 <= m <= n <= N``.

    The scan starts at ``m = 2`` because ``f_1 = 0`` whenever ``beta > 0``.
    The verdict grades how K evolves with the prefix length.
    """
    if not 0 < sigma < 1:
        raise DomainError("sigma must lie in (0, 1)")
    if beta < 0:
        raise DomainError("beta must be non-negative")
    if N < 3:
        raise DomainError("N must be at least 3")
    hist = quasi_f_history(X, sigma, beta, N)
    idx = np.arange(2, N + 1)
    K = float(hist[-1])
    slope = loglog_slope(idx, hist)
    rep = GrowthReport(
        f"quasi-f-power increasing (sigma={sigma}, beta={beta})",
        K,
        int(idx[int(np.argmax(hist))]),
        slope,
        grade(slope, thresholds),
        idx,
        hist,
        {"K_min": K, "K_half": float(hist[(N // 2) - 2]) if N // 2 >= 2 else K},
    )
    return K, rep


def quasi_f_bruteforce(X: LazySequence, sigma: float, beta: float, N: int) -> float:
    """O(N^2) reference for :func:`quasi_f_power_check`."""
    g = f_power(np.arange(2, N + 1), sigma, beta) * _positive_prefix(X, 2, N)
    best = 1.0
    for j in range(len(g)):
        best = max(best, float(np.max(g[: j + 1] / g[j])))
    return best


def almost_increasing_diagnostic(
    b: LazySequence, N: int, thresholds: Thresholds = DEFAULT_THRESHOLDS
) -> GrowthReport:
    """Best lower constant M with the running maximum as increasing witness.

    ``c_n = max_{m <= n} b_m`` gives the upper constant 1; the report's
    history is ``c_n / b_n`` so that ``M = 1 / sup_ratio``.
    """
    lo = max(b.start, 1)
    vals = _positive_prefix(b, lo, N)
    env = np.maximum.accumulate(vals)
    idx = np.arange(lo, N + 1)
    rep = GrowthReport.from_history("almost increasing: M c_n <= b_n <= c_n", idx, env / vals, thresholds)
    M = 1.0 / rep.sup_ratio
    verdict = rep.verdict
    if verdict == CONSISTENT and M < thresholds.almost_increasing_floor:
        verdict = INCONCLUSIVE
    return GrowthReport(rep.claim, rep.sup_ratio, rep.argmax_index, rep.tail_slope, verdict,
                        rep.indices, rep.history, {"M": M})


@dataclass
class WeightSystem:
    """Positive weights ``p`` and their totals ``P``; negative indices read 0."""

    p: LazySequence
    P: LazySequence

    def p_at(self, n: int) -> float:
        return 0.0 if n < 0 else self.p[n]

    def P_at(self, n: int) -> float:
        return 0.0 if n < 0 else self.P[n]

    def p_values(self, N: int) -> np.ndarray:
        return self.p.values(N)

    def P_values(self, N: int) -> np.ndarray:
        return self.P.values(N)

    def P_long(self, N: int) -> np.ndarray:
        """Totals accumulated in extended precision (for companion rows)."""
        return np.cumsum(self.p.values(N).astype(np.longdouble))


def make_weights(p: LazySequence) -> WeightSystem:
    """Validate ``p`` (strictly positive from index 0) and attach totals."""
    if p.start != 0:
        raise DomainError("weights must be defined from index 0")

    def block(lo, hi):
        vals = p.values(hi)[lo : hi + 1]
        bad = np.nonzero(~(vals > 0))[0]
        if len(bad):
            i = lo + int(bad[0])
            raise DomainError(f"non-positive weight {vals[bad[0]]!r} at index {i}", i)
        return vals

    checked = _derived(block, 0, p.name)
    return WeightSystem(checked, partial_sums(checked))


def unit_weights() -> WeightSystem:
    return make_weights(LazySequence.constant(1.0))


def sequence_from_expression(expr: str, start: int = 0) -> LazySequence:
    """Compile an expression in ``n`` (see :mod:`abssum.expr`)."""
    from .expr import compile_expression

    func = compile_expression(expr)
    return LazySequence.from_function(func, start, expr)


def as_sequence(obj, start: int = 0) -> LazySequence:
    """Coerce a number, string expression, array or sequence."""
    if isinstance(obj, LazySequence):
        return obj
    if isinstance(obj, str):
        return sequence_from_expression(obj, start)
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return LazySequence.constant(float(obj), start)
    if isinstance(obj, (Sequence, np.ndarray)):
        return LazySequence.from_values(obj, start)
    if callable(obj):
        return LazySequence(obj, start)
    raise TypeError(f"cannot build a sequence from {type(obj).__name__}")


def telescoping_gap(lam: LazySequence, n: int) -> float:
    """``lam_start - lam_{n+1} - sum_{m<=n} D lam_m``; zero in exact arithmetic."""
    d = forward_difference(lam).values(n)[lam.start :]
    return lam[lam.start] - lam[n + 1] - math.fsum(d.tolist())
