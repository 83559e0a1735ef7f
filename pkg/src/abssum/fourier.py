"""Trigonometric Fourier series of 2*pi-periodic functions.

Coefficients are computed with QUADPACK's oscillatory rules (via
``scipy.integrate.quad`` with a ``cos``/``sin`` weight), panel by panel
between the registered jump points of the function.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import AccuracyError, DomainError
from .matrices import TriangularMethod
from .sequences import (
    CONSISTENT,
    DEFAULT_THRESHOLDS,
    DIVERGING,
    INCONCLUSIVE,
    GrowthReport,
    LazySequence,
    Thresholds,
    WeightSystem,
    _derived,
    grade,
)
from .numerics import loglog_slope
from .summability import HypothesisLedger, SummabilityLedger, check_hypotheses, factored_series, index_matrix

TWO_PI = 2 * math.pi
SMOOTHNESS = ("smooth", "piecewise", "bv-only")
PHI_BV = "phi-bounded-variation"
PHI1_BV = "phi1-bounded-variation"
T_BOUNDED = "t-of-x-bounded"


def reduce_argument(t):
    """Map ``t`` into ``[-pi, pi)`` by whole periods."""
    return np.mod(np.asarray(t, dtype=float) + math.pi, TWO_PI) - math.pi


@dataclass
class PeriodicFunction:
    """``f`` on ``[-pi, pi)`` extended periodically.

    ``func`` is vectorised and only ever called on reduced arguments.
    ``jumps`` lists discontinuities (or kinks worth splitting at) inside
    ``(-pi, pi)``; the period boundary is always a panel edge.
    """

    func: Callable[[np.ndarray], np.ndarray]
    smoothness: str = "smooth"
    jumps: Sequence[float] = ()
    name: str = "f"

    def __post_init__(self):
        if self.smoothness not in SMOOTHNESS:
            raise DomainError(f"smoothness must be one of {SMOOTHNESS}")
        self.jumps = tuple(sorted(float(j) for j in self.jumps if -math.pi < j < math.pi))

    def __call__(self, t):
        out = self.func(reduce_argument(t))
        return out if np.ndim(t) else float(out)

    def panels(self) -> list[tuple[float, float]]:
        edges = [-math.pi, *self.jumps, math.pi]
        return list(zip(edges[:-1], edges[1:]))


def sawtooth() -> PeriodicFunction:
    """``f(t) = t`` on ``(-pi, pi)``."""
    return PeriodicFunction(lambda t: np.asarray(t, dtype=float), "piecewise", (), "sawtooth")


def square() -> PeriodicFunction:
    return PeriodicFunction(lambda t: np.sign(t), "piecewise", (0.0,), "square")


def triangle() -> PeriodicFunction:
    """``f(t) = |t|``; kink at 0."""
    return PeriodicFunction(np.abs, "piecewise", (0.0,), "triangle")


def sine(m: float = 1.0) -> PeriodicFunction:
    return PeriodicFunction(lambda t: np.sin(m * np.asarray(t)), "smooth", (), f"sin({m:g}t)")


def cosine(m: float = 1.0) -> PeriodicFunction:
    return PeriodicFunction(lambda t: np.cos(m * np.asarray(t)), "smooth", (), f"cos({m:g}t)")


def sampled(ts, fs, name: str = "custom") -> PeriodicFunction:
    """Linear interpolation through samples ``(t, f(t))`` on ``[-pi, pi]``."""
    ts = np.asarray(ts, dtype=float)
    fs = np.asarray(fs, dtype=float)
    order = np.argsort(ts)
    ts, fs = ts[order], fs[order]
    if len(ts) < 2:
        raise DomainError("need at least two samples")
    if ts[0] < -math.pi - 1e-12 or ts[-1] > math.pi + 1e-12:
        raise DomainError("sample abscissae must lie in [-pi, pi]")
    return PeriodicFunction(lambda t: np.interp(t, ts, fs), "piecewise", tuple(ts[1:-1]), name)


def sampled_from_csv(path) -> PeriodicFunction:
    ts, fs = [], []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            try:
                t, f = float(rec[0]), float(rec[1])
            except ValueError:
                continue  # header line
            ts.append(t)
            fs.append(f)
    return sampled(ts, fs, f"custom({path})")


LIBRARY: dict[str, Callable[..., PeriodicFunction]] = {
    "sawtooth": sawtooth,
    "square": square,
    "triangle": triangle,
    "sin": sine,
    "cos": cosine,
}


def _quad(func, lo, hi, tol, what, **kw) -> float:
    res = integrate.quad(func, lo, hi, epsabs=tol, epsrel=0.0, limit=200, full_output=1, **kw)
    value, err = res[0], res[1]
    warned = len(res) > 3
    if warned and err > 10 * tol:
        raise AccuracyError(f"fourier: quadrature for {what} reached only {err:.3g}", err)
    return value


def fourier_coefficients(f: PeriodicFunction, n: int, tol: float = 1e-10) -> tuple[float, float]:
    """``(a_n, b_n)`` with ``a_n = (1/pi) int f cos(nt)``, ``b_n = (1/pi) int f sin(nt)``."""
    if n < 0:
        raise DomainError("coefficient index must be non-negative")
    panels = f.panels()
    tol_panel = tol * math.pi / len(panels)
    if n == 0:
        a = sum(_quad(f.func, lo, hi, tol_panel, "a_0") for lo, hi in panels)
        return a / math.pi, 0.0
    a = sum(_quad(f.func, lo, hi, tol_panel, f"a_{n}", weight="cos", wvar=n) for lo, hi in panels)
    b = sum(_quad(f.func, lo, hi, tol_panel, f"b_{n}", weight="sin", wvar=n) for lo, hi in panels)
    return a / math.pi, b / math.pi


def phi(f: PeriodicFunction, x: float) -> Callable:
    """``t -> (f(x+t) + f(x-t)) / 2``."""

    def g(t):
        return 0.5 * (f(np.add(x, t)) + f(np.subtract(x, t)))

    return g


def phi_jumps(f: PeriodicFunction, x: float, upper: float = math.pi) -> list[float]:
    """Points in ``(0, upper)`` where ``phi`` inherits a jump of ``f``."""
    marks = [*f.jumps, -math.pi]
    pts = set()
    for j in marks:
        for base in (j - x, x - j):
            for k in range(-2, 3):
                u = base + k * TWO_PI
                if 0 < u < upper:
                    pts.add(round(u, 15))
    return sorted(pts)


def phi_alpha(f: PeriodicFunction, x: float, alpha: float, tol: float = 1e-12) -> Callable:
    """``t -> (alpha / t^alpha) int_0^t (t-u)^(alpha-1) phi(u) du`` for ``t`` in ``(0, pi]``.

    The last panel carries the algebraic endpoint weight ``(t-u)^(alpha-1)``
    through QUADPACK's QAWS rule, so ``alpha < 1`` needs no special casing.
    """
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    g = phi(f, x)
    jumps = phi_jumps(f, x)

    def scalar(t):
        if not 0 < t <= math.pi + 1e-12:
            raise DomainError(f"phi_alpha is defined for t in (0, pi], got {t}")
        edges = [0.0, *[u for u in jumps if u < t], t]
        total = 0.0
        for lo, hi in zip(edges[:-2], edges[1:-1]):
            total += _quad(lambda u: (t - u) ** (alpha - 1) * g(u), lo, hi, tol, "phi_alpha")
        lo = edges[-2]
        if alpha == 1:
            total += _quad(g, lo, t, tol, "phi_alpha")
        else:
            total += _quad(g, lo, t, tol, "phi_alpha", weight="alg", wvar=(0.0, alpha - 1))
        return alpha * total / t**alpha

    def running_mean(ts):
        # alpha = 1: phi_1(t) = (1/t) int_0^t phi, accumulated cell by cell
        order = np.argsort(ts)
        out = np.empty(len(ts))
        total, prev = 0.0, 0.0
        for i in order:
            t = float(ts[i])
            edges = [prev, *[u for u in jumps if prev < u < t], t]
            for lo, hi in zip(edges[:-1], edges[1:]):
                total += _quad(g, lo, hi, tol, "phi_alpha")
            out[i] = total / t
            prev = t
        return out

    def evaluate(t):
        if np.ndim(t):
            flat = np.ravel(np.asarray(t, dtype=float))
            if alpha == 1:
                if flat.size and (flat.min() <= 0 or flat.max() > math.pi + 1e-12):
                    raise DomainError("phi_alpha is defined for t in (0, pi]")
                return running_mean(flat).reshape(np.shape(t))
            return np.array([scalar(float(s)) for s in flat]).reshape(np.shape(t))
        return scalar(float(t))

    return evaluate


def dyadic_grid(level: int, interval=(0.0, math.pi)) -> np.ndarray:
    """Interior points ``a + (b-a) i / 2^level``, ``0 < i < 2^level``."""
    a, b = interval
    M = 2**level
    return a + (b - a) * np.arange(1, M) / M


def total_variation(values) -> float:
    return float(np.sum(np.abs(np.diff(np.asarray(values, dtype=float)))))


def bv_diagnostic(
    g: Callable,
    interval=(0.0, math.pi),
    levels: Sequence[int] = tuple(range(6, 15)),
    tol: float = 1e-3,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
    vectorized: bool = True,
) -> GrowthReport:
    """Total variation of ``g`` on nested dyadic grids of the open interval.

    Consistent-with-bounded when the last refinement changes the variation
    by at most ``tol`` relative; otherwise the log-log slope of the
    variation against the grid size decides between diverging and
    inconclusive.
    """
    levels = list(levels)
    if levels != sorted(levels) or len(set(levels)) != len(levels):
        raise DomainError("grid levels must be strictly increasing")
    var = []
    for L in levels:
        pts = dyadic_grid(L, interval)
        vals = g(pts) if vectorized else np.array([g(float(p)) for p in pts])
        var.append(total_variation(vals))
    var = np.array(var)
    sizes = np.array([2**L for L in levels])
    slope = loglog_slope(sizes, var) if len(var) > 1 else 0.0
    change = abs(var[-1] - var[-2]) / max(1.0, abs(var[-1])) if len(var) > 1 else math.inf
    if change <= tol:
        verdict = CONSISTENT
    else:
        verdict = grade(slope, thresholds)
        if verdict == CONSISTENT:
            verdict = INCONCLUSIVE
    return GrowthReport("total variation on (a, b) is finite", float(var[-1]), int(sizes[-1]), slope, verdict,
                        sizes, var, {"last_change": change, "variations": var.tolist()})


class FourierState:
    """Memoised coefficients of ``f`` and the derived sequences at ``x``.

    ``C_n(x) = a_n cos(nx) + b_n sin(nx)`` for ``n >= 1``; the constant term
    is dropped (the series of ``f - a_0/2``). ``t`` is the (C,1) mean of
    ``(n C_n(x))``.
    """

    def __init__(self, f: PeriodicFunction, x: float, tol: float = 1e-10):
        if not -math.pi <= x <= math.pi:
            raise DomainError("x must lie in [-pi, pi]")
        self.f = f
        self.x = float(x)
        self.tol = tol
        self._coeffs: dict[int, tuple[float, float]] = {}
        self.C = _derived(self._c_block, 1, f"C[{f.name}]")
        from .summability import cesaro_one_mean

        self.t = cesaro_one_mean(self.C)

    def coefficients(self, n: int) -> tuple[float, float]:
        if n not in self._coeffs:
            self._coeffs[n] = fourier_coefficients(self.f, n, self.tol)
        return self._coeffs[n]

    @property
    def mean(self) -> float:
        """``a_0 / 2``, the constant removed from ``f``."""
        return self.coefficients(0)[0] / 2

    def centered(self) -> PeriodicFunction:
        m = self.mean
        f = self.f
        return PeriodicFunction(lambda t: f.func(t) - m, f.smoothness, f.jumps, f"{f.name}-mean")

    def _c_block(self, lo, hi):
        out = np.empty(hi - lo + 1)
        for i, n in enumerate(range(lo, hi + 1)):
            a, b = self.coefficients(n)
            out[i] = a * math.cos(n * self.x) + b * math.sin(n * self.x)
        return out


def t_n_of_x(state: FourierState, n: int) -> float:
    """``t_n(x) = (1/(n+1)) sum_{v=1}^{n} v C_v(x)``."""
    return state.t[n]


def t_boundedness_report(state: FourierState, N: int, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> GrowthReport:
    n = np.arange(1, N + 1)
    return GrowthReport.from_history("t_n(x) = O(1)", n, state.t.values(N)[1:], thresholds)


def fourier_summability_experiment(
    f: PeriodicFunction,
    x: float,
    lam: LazySequence,
    X: LazySequence,
    w: WeightSystem,
    A: TriangularMethod,
    k: float,
    variant: str,
    N: int,
    sigma: float = 0.5,
    beta: float = 0.0,
    tol: float = 1e-10,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
    bv_levels: Sequence[int] = tuple(range(6, 15)),
) -> tuple[HypothesisLedger, SummabilityLedger]:
    """Hypotheses and ``|A,p_n|_k`` ledger for ``sum C_n(x) lambda_n``.

    The hypothesis ledger also carries bounded-variation reports for both
    ``phi`` and ``phi_1`` (kept separate) and the empirical sup of
    ``|t_n(x)|``.
    """
    state = FourierState(f, x, tol)
    hyp = check_hypotheses(state.C, lam, X, w, k, variant, N, sigma, beta, thresholds)
    centered = state.centered()
    extra = {
        PHI_BV: bv_diagnostic(phi(centered, x), levels=bv_levels, thresholds=thresholds),
        PHI1_BV: bv_diagnostic(phi_alpha(centered, x, 1.0, tol=1e-11), levels=bv_levels,
                               thresholds=thresholds),
        T_BOUNDED: t_boundedness_report(state, N, thresholds),
    }
    ledger = index_matrix(factored_series(state.C, lam), A, w, k, N)
    return hyp.merged(extra), ledger
