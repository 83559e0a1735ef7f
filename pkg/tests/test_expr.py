from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from abssum.errors import ConfigError
from abssum.expr import compile_expression


N = np.arange(0, 50)


@pytest.mark.parametrize(
    "text, oracle",
    [
        ("1/(n+1)", lambda n: 1 / (n + 1)),
        ("log(n+2)", lambda n: np.log(n + 2)),
        ("n^0.5", lambda n: n**0.5),
        ("n**2 - 3*n + 1", lambda n: n**2 - 3 * n + 1),
        ("2^-n", lambda n: 2.0 ** (-n)),
        ("-n^2", lambda n: -(n**2)),
        ("2^3^2", lambda n: np.full(len(n), 512.0)),
        ("sqrt(n+1)*exp(-n/10)", lambda n: np.sqrt(n + 1) * np.exp(-n / 10)),
        ("sin(pi*n/2) + cos(e)", lambda n: np.sin(np.pi * n / 2) + math.cos(math.e)),
        ("abs(n-10) + floor(n/3)", lambda n: np.abs(n - 10) + np.floor(n / 3)),
    ],
)
def test_expression_values(text, oracle):
    np.testing.assert_allclose(compile_expression(text)(N), oracle(N.astype(float)), rtol=1e-15, atol=1e-300)


def test_alternating_sign_is_exact():
    f = compile_expression("(-1)^n")
    np.testing.assert_array_equal(f(np.arange(6)), [1, -1, 1, -1, 1, -1])
    g = compile_expression("(-1)^(n+1)/n")
    assert g(np.array([3]))[0] == 1 / 3


def test_constant_expression_broadcasts():
    assert compile_expression("3")(np.arange(4)).shape == (4,)


@pytest.mark.parametrize("bad", ["", "1/(n+1", "n +* 2", "foo(n)", "m + 1", "n $ 2", "()"])
def test_syntax_errors_are_config_errors(bad):
    with pytest.raises(ConfigError):
        compile_expression(bad)


@given(st.integers(-50, 50), st.integers(1, 20))
def test_integer_arithmetic_agrees_with_python(a, b):
    f = compile_expression(f"({a})*n + {b}")
    assert f(np.array([7]))[0] == a * 7 + b
