from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from abssum.decomposition import (
    bounded_sums,
    bounded_sums_reports,
    column_difference_checks,
    decompose,
    decomposition_table,
    domination_gap,
    iter_decomposition,
)
from abssum.matrices import (
    cesaro_method,
    delta_transform_values,
    head_heavy_method,
    random_method,
    weighted_mean_method,
)
from abssum.sequences import (
    CONSISTENT,
    DIVERGING,
    LazySequence,
    make_weights,
    sequence_from_expression,
    unit_weights,
)
from abssum.summability import cesaro_one_mean, factored_series, invert_cesaro_one_mean


def random_series(seed: int, N: int) -> LazySequence:
    rng = np.random.default_rng(seed)
    return LazySequence.from_values(np.concatenate(([0.0], rng.normal(size=N + 1))), 0)


def linear_weights():
    return make_weights(sequence_from_expression("n+1"))


def test_zero_factor_gives_zero_row():
    A = weighted_mean_method(unit_weights())
    row = decompose(A, random_series(0, 20), LazySequence.constant(0.0), 20)
    assert row.delta_I == 0.0 and row.pieces == (0.0, 0.0, 0.0, 0.0)


def test_constant_factor_kills_second_piece():
    A = cesaro_method(0.5)
    a = random_series(1, 40)
    c = 2.5
    const = decompose(A, a, LazySequence.constant(c), 40)
    plain = decompose(A, a, LazySequence.constant(1.0), 40)
    assert const.I2 == 0.0
    assert const.delta_I == pytest.approx(c * plain.delta_I, rel=1e-14, abs=1e-15)


def test_residual_on_linear_weights():
    w = linear_weights()
    A = weighted_mean_method(w)
    a = random_series(2, 500)
    lam = sequence_from_expression("1/(n+1)")
    table = decomposition_table(A, a, lam, 500)
    assert table.max_scaled_residual() <= 1e-10
    # a_nn = p_n/P_n for the weighted mean
    n = table.n
    t = cesaro_one_mean(a).values(500)[n]
    p, P = w.p_values(500)[n], w.P_values(500)[n]
    np.testing.assert_allclose(table.I[:, 3], p / P * lam.values(500)[n] * t * (n + 1) / n, rtol=1e-13)


def test_rows_match_single_decompose():
    A = random_method(4)
    a = random_series(3, 60)
    lam = sequence_from_expression("1/log(n+2)")
    rows = list(iter_decomposition(A, a, lam, 60))
    for n in (1, 2, 37, 60):
        single = decompose(A, a, lam, n)
        assert rows[n - 1].pieces == pytest.approx(single.pieces, rel=1e-15, abs=1e-18)
    with pytest.raises(ValueError):
        decompose(A, a, lam, 0)


@pytest.mark.parametrize("method", [lambda: cesaro_method(0.5), lambda: random_method(9),
                                    lambda: weighted_mean_method(linear_weights())])
def test_delta_I_equals_delta_transform_of_factored_series(method):
    A = method()
    N = 300
    a = random_series(5, N)
    lam = sequence_from_expression("1/(n+1)^0.7")
    table = decomposition_table(A, a, lam, N)
    direct = delta_transform_values(A, factored_series(a, lam), N)[1:]
    np.testing.assert_allclose(table.delta_I, direct, rtol=1e-12, atol=1e-15)


@given(st.integers(0, 10_000), st.sampled_from([1.0, 1.5, 2.0]))
def test_domination_inequality(seed, k):
    rng = np.random.default_rng(seed)
    A = random_method(seed % 7)
    a = LazySequence.from_values(rng.normal(size=81))
    lam = LazySequence.from_values(rng.uniform(0, 1, 82))
    pieces, total = bounded_sums(A, a, lam, unit_weights(), k, 80)
    gap = domination_gap(pieces, total)
    assert np.all(gap >= -1e-12 * np.maximum(total.terms, 1e-300))


def test_zero_factor_gives_zero_ledgers():
    pieces, total = bounded_sums(cesaro_method(0.5), random_series(6, 50), LazySequence.constant(0.0),
                                 unit_weights(), 1.5, 50)
    assert total.total == 0.0 and all(p.total == 0.0 for p in pieces)


def test_bounded_scenario_ledgers_flatten():
    a = invert_cesaro_one_mean(sequence_from_expression("(-1)^n", 1))
    lam = sequence_from_expression("1/(n+1)")
    w = unit_weights()
    pieces, total = bounded_sums(weighted_mean_method(w), a, lam, w, 1.0, 3000)
    reps = bounded_sums_reports(pieces, total)
    assert list(reps) == ["I1-sum", "I2-sum", "I3-sum", "I4-sum", "total-sum"]
    assert all(r.verdict == CONSISTENT for r in reps.values())


def test_table_csv(tmp_path):
    table = decomposition_table(cesaro_method(1.0), random_series(7, 5), sequence_from_expression("1/(n+1)"), 5)
    table.to_csv(tmp_path / "d.csv")
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert lines[0] == "# abssum-csv v1 decomposition"
    assert lines[1] == "n,delta_I,I1,I2,I3,I4,residual"
    assert len(lines) == 7


# --------------------------------------------------------- column differences


def test_unit_weight_row_bound_closed_form():
    identity, bounds = column_difference_checks(weighted_mean_method(unit_weights()), 300)
    assert identity.verdict == CONSISTENT
    assert bounds.verdict == CONSISTENT
    n = np.arange(1, 301)
    # sum_{v=1}^{n-1} 1/(n(n+1)) = (n-1)/(n(n+1)) against a_nn = 1/(n+1)
    np.testing.assert_allclose(bounds.detail["row_slacks"], 1 / (n + 1) - (n - 1) / (n * (n + 1)), rtol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_identity_holds_on_random_methods(seed):
    identity, _ = column_difference_checks(random_method(seed, normalized=bool(seed % 2)), 100)
    assert identity.verdict == CONSISTENT
    assert identity.sup_ratio <= 1e-13


def test_monotonicity_violation_gives_negative_slack():
    _, bounds = column_difference_checks(head_heavy_method(), 60)
    assert bounds.verdict == DIVERGING
    assert min(bounds.detail["row_slack"], bounds.detail["column_slack"]) < 0
    assert not bounds.detail["holds"]


def test_hat_column_sums_are_logged():
    _, bounds = column_difference_checks(cesaro_method(0.5), 50)
    sums = bounds.detail["hat_column_sums"]
    assert sums.shape == (51,) and np.all(np.isfinite(sums))
