from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from abssum.errors import DomainError
from abssum.matrices import cesaro_method, general_cesaro_method, identity_method, random_method, weighted_mean_method
from abssum.sequences import (
    CONSISTENT,
    DIVERGING,
    LazySequence,
    make_weights,
    sequence_from_expression,
    unit_weights,
)
from abssum.summability import (
    FACTOR_MAJORANT,
    HARMONIC_T,
    HARMONIC_T_X,
    MAJORANT_CLASS,
    SECOND_DIFFERENCE,
    WEIGHT_GROWTH,
    WEIGHTED_T,
    WEIGHTED_T_X,
    HypothesisLedger,
    SummabilityLedger,
    cesaro_one_mean,
    check_hypotheses,
    check_lemma,
    factored_series,
    index_cesaro,
    index_matrix,
    index_weighted,
    invert_cesaro_one_mean,
)

LAM = "1/(n+1)"
X = "log(n+2)"


def bounded_t_scenario():
    """Series whose (C,1) mean of (n a_n) is the bounded t_n = (-1)^n."""
    return invert_cesaro_one_mean(sequence_from_expression("(-1)^n", 1))


def impulse():
    return LazySequence.from_function(lambda i: (i == 0).astype(float))


# --------------------------------------------------------------- (C,1) mean


def test_cesaro_one_mean_definition():
    a = sequence_from_expression("1/n", 1)
    t = cesaro_one_mean(a).values(10)
    np.testing.assert_allclose(t, np.arange(11) / np.arange(1, 12), rtol=1e-15)


def test_inversion_round_trip():
    rng = np.random.default_rng(7)
    N = 5000
    t = LazySequence.from_values(np.concatenate(([0.0], rng.uniform(-1, 1, N))))
    back = cesaro_one_mean(invert_cesaro_one_mean(t)).values(N)
    assert np.max(np.abs(back - t.values(N))) <= 1e-12


def test_inversion_requires_vanishing_t0():
    with pytest.raises(DomainError):
        invert_cesaro_one_mean(LazySequence.constant(1.0))


def test_factored_series_examples():
    a = sequence_from_expression("1/n", 1)
    assert factored_series(a, LazySequence.constant(1.0)).values(20).tolist() == a.values(20).tolist()
    assert not factored_series(a, LazySequence.constant(0.0)).values(20).any()
    f = factored_series(a, sequence_from_expression("1/log(n+1)"))
    for n in (1, 5, 99):
        assert f[n] == (1 / n) * (1 / math.log(n + 1))


# ------------------------------------------------------------------ ledgers


def test_ledger_partials_nondecreasing_and_negative_terms_rejected():
    L = SummabilityLedger.build("x", 1.0, [1, 2, 3], [0.5, 0.0, 2.0])
    assert np.all(np.diff(L.partials) >= 0)
    assert L.total == 2.5 and L.N == 3
    with pytest.raises(DomainError):
        SummabilityLedger.build("x", 1.0, [1], [-1.0])


def test_ledger_csv(tmp_path):
    L = index_cesaro(sequence_from_expression("(-1)^n/n", 1), 1.0, 1.0, 5)
    L.to_csv(tmp_path / "l.csv")
    lines = (tmp_path / "l.csv").read_text().splitlines()
    assert lines[0].startswith("# abssum-csv v1 ledger")
    assert lines[1] == "n,term,partial_sum"
    assert len(lines) == 7
    assert float(lines[-1].split(",")[2]) == L.total


def test_hypothesis_ledger_verdict_and_csv(tmp_path):
    a = bounded_t_scenario()
    hyp = check_hypotheses(a, sequence_from_expression(LAM), sequence_from_expression(X), unit_weights(),
                           1.0, "quasi-f", 2000, 0.5, 1.0)
    hyp.to_csv(tmp_path / "h.csv")
    lines = (tmp_path / "h.csv").read_text().splitlines()
    assert lines[1] == "condition_id,sup_ratio,argmax_index,tail_slope,verdict"
    assert len(lines) == 2 + len(hyp.reports)
    assert hyp.verdict == CONSISTENT and hyp.failures() == []
    assert FACTOR_MAJORANT in hyp


# ------------------------------------------------------------------ indices


def test_index_cesaro_impulse_is_zero():
    L = index_cesaro(impulse(), 0.5, 1.5, 50)
    assert L.total == 0.0


def test_index_cesaro_alternating_harmonic_flattens():
    L = index_cesaro(sequence_from_expression("(-1)^n/n", 1), 1.0, 1.0, 4000)
    assert L.report().verdict == CONSISTENT


@given(st.lists(st.floats(-3, 3), min_size=10, max_size=80), st.sampled_from([0.5, 1.0]),
       st.sampled_from([1.0, 1.5, 2.0]))
def test_index_cesaro_two_forms_agree(xs, alpha, k):
    a = LazySequence.from_values(xs)
    L = index_cesaro(a, alpha, k, len(xs) - 1)
    diff = L.extra["difference_terms"]
    # relative to the magnitude of the summands that formed each term
    n = L.indices
    A = general_cesaro_method(alpha)
    av = np.abs(np.array(xs, dtype=float))
    # u_n - u_{n-1} is a difference of two means, each of size sum |bar_nv a_v|
    mass = np.array([float(np.sum((np.abs(r.bar[: r.n]) + np.abs(r.bar[: r.n] - r.hat[: r.n])) * av[: r.n])
                           + abs(r.bar[r.n]) * av[r.n]) for r in A.rows(len(xs) - 1)])[1:]
    scale = n ** (k - 1) * mass**k
    assert np.all(np.abs(diff - L.terms) <= 1e-11 * scale)


def test_index_weighted_unit_weights_is_cesaro_one_for_k1():
    a = sequence_from_expression("sin(n)/n", 1)
    N = 1000
    W = index_weighted(a, unit_weights(), 1.0, N)
    C = index_cesaro(a, 1.0, 1.0, N)
    # t_n = (1/(n+1)) sum v a_v can nearly cancel, so compare on the scale of its summands
    n = np.arange(1, N + 1)
    scale = np.cumsum(np.abs(np.sin(n))) / (n * (n + 1))
    assert np.all(np.abs(W.terms - C.terms) <= 1e-12 * scale)


@pytest.mark.parametrize("k", [1.5, 2.0])
def test_index_weighted_unit_weights_vs_cesaro_differ_by_index_shift(k):
    # P_n/p_n = n + 1 against the n of the Cesaro form
    a = sequence_from_expression("sin(n)/n", 1)
    N = 500
    W = index_weighted(a, unit_weights(), k, N)
    C = index_cesaro(a, 1.0, k, N)
    n = W.indices
    np.testing.assert_allclose(W.terms, C.terms * ((n + 1) / n) ** (k - 1), rtol=1e-12)


def test_index_weighted_constant_series():
    c = LazySequence.from_function(lambda i: 3.0 * (i == 0))
    assert index_weighted(c, make_weights(sequence_from_expression("n+1")), 2.0, 100).total == 0.0


@pytest.mark.parametrize("k", [1.0, 1.5, 2.0])
def test_weighted_index_two_routes(k):
    rng = np.random.default_rng(3)
    a = LazySequence.from_values(rng.normal(size=401))
    w = make_weights(sequence_from_expression("1/sqrt(n+1)"))
    W = index_weighted(a, w, k, 400)
    M = index_matrix(a, weighted_mean_method(w), w, k, 400)
    np.testing.assert_allclose(M.terms, W.terms, rtol=1e-12, atol=1e-300)


def test_identity_index_is_absolute_convergence():
    a = sequence_from_expression("(-1)^n/n^2", 1)
    L = index_matrix(a, identity_method(), unit_weights(), 1.0, 300)
    np.testing.assert_allclose(L.terms, np.abs(a.values(300)[1:]), rtol=1e-15)


def test_unit_weights_give_plain_matrix_index():
    a = sequence_from_expression("cos(n)/n", 1)
    A = random_method(2)
    L = index_matrix(a, A, unit_weights(), 1.7, 200)
    delta = L.extra["delta"][1:]
    np.testing.assert_allclose(L.terms, np.abs(delta) ** 1.7 * np.arange(2, 202) ** 0.7, rtol=1e-13)


def test_cesaro_half_index_is_graded():
    a = sequence_from_expression("(-1)^n*n^-0.9", 1)
    rep = index_matrix(a, cesaro_method(0.5), unit_weights(), 1.0, 3000).report()
    assert rep.verdict in (CONSISTENT, "inconclusive", DIVERGING)
    assert np.isfinite(rep.tail_slope)


@pytest.mark.parametrize("func", [index_cesaro, index_weighted, index_matrix])
def test_k_below_one_rejected(func):
    a = sequence_from_expression("1/n", 1)
    args = {
        index_cesaro: (a, 1.0, 0.5, 10),
        index_weighted: (a, unit_weights(), 0.5, 10),
        index_matrix: (a, identity_method(), unit_weights(), 0.5, 10),
    }[func]
    with pytest.raises(DomainError, match="k >= 1"):
        func(*args)


# --------------------------------------------------------------- hypotheses


def test_bounded_t_scenario_passes_all_conditions():
    hyp = check_hypotheses(bounded_t_scenario(), sequence_from_expression(LAM), sequence_from_expression(X),
                           unit_weights(), 1.0, "almost-increasing", 3000)
    assert set(hyp.reports) >= {FACTOR_MAJORANT, SECOND_DIFFERENCE, WEIGHT_GROWTH, WEIGHTED_T, HARMONIC_T,
                                MAJORANT_CLASS}
    assert hyp.passed, hyp.failures()


def test_unit_factor_fails_factor_condition():
    hyp = check_hypotheses(bounded_t_scenario(), LazySequence.constant(1.0), sequence_from_expression(X),
                           unit_weights(), 1.0, "quasi-f", 10000, 0.5, 1.0)
    assert hyp[FACTOR_MAJORANT].verdict == DIVERGING
    assert not hyp.passed


def test_weight_growth_ratio_oracle():
    m = np.arange(1, 2001)
    oracle = np.cumsum((m + 1) / m) / (m + 1)
    hyp = check_hypotheses(bounded_t_scenario(), sequence_from_expression(LAM), sequence_from_expression(X),
                           unit_weights(), 1.0, "quasi-sigma", 2000)
    assert hyp[WEIGHT_GROWTH].sup_ratio == pytest.approx(oracle.max(), rel=1e-13)
    assert hyp[WEIGHT_GROWTH].verdict == CONSISTENT


def test_variant_selects_t_conditions():
    args = (bounded_t_scenario(), sequence_from_expression(LAM), sequence_from_expression(X), unit_weights(), 2.0)
    ai = check_hypotheses(*args, "almost-increasing", 200)
    qs = check_hypotheses(*args, "quasi-sigma", 200)
    assert WEIGHTED_T in ai and WEIGHTED_T_X not in ai
    assert HARMONIC_T_X in qs and HARMONIC_T not in qs
    with pytest.raises(DomainError):
        check_hypotheses(*args, "nope", 200)


@given(st.floats(0.05, 0.95), st.integers(200, 600))
def test_quasi_f_with_beta_zero_equals_quasi_sigma(sigma, N):
    args = (bounded_t_scenario(), sequence_from_expression(LAM), sequence_from_expression("n^0.3"),
            unit_weights(), 1.5)
    f = check_hypotheses(*args, "quasi-f", N, sigma, 0.0)
    s = check_hypotheses(*args, "quasi-sigma", N, sigma, 0.0)
    if f.passed:
        assert s.passed
    assert f[MAJORANT_CLASS].sup_ratio == s[MAJORANT_CLASS].sup_ratio


def test_non_positive_majorant_rejected():
    with pytest.raises(DomainError):
        check_hypotheses(bounded_t_scenario(), sequence_from_expression(LAM), sequence_from_expression("n-3"),
                         unit_weights(), 1.0, "quasi-f", 10)


# -------------------------------------------------------------------- lemma


def test_lemma_constant_factor():
    p, s = check_lemma(LazySequence.constant(2.0), sequence_from_expression(X), 100)
    assert p.sup_ratio == 0.0 and s.sup_ratio == 0.0


def test_lemma_scenario_consistent():
    p, s = check_lemma(sequence_from_expression(LAM), sequence_from_expression(X), 20000)
    assert p.verdict == CONSISTENT and s.verdict == CONSISTENT
    n = np.arange(1, 20001)
    oracle = n * np.log(n + 2) / ((n + 1) * (n + 2))
    assert p.sup_ratio == pytest.approx(oracle.max(), rel=1e-13)


def test_lemma_log_factor_is_not_bounded():
    # sum 1/(n log n) grows like log log N: the partial sums keep rising
    _, s = check_lemma(sequence_from_expression("1/log(n+2)"), sequence_from_expression(X), 100000)
    assert s.verdict != CONSISTENT
    assert s.tail_slope > 0.02
    h = s.history
    assert h[-1] - h[9999] == pytest.approx(math.log(math.log(1e5) / math.log(1e4)), abs=0.01)
