"""Declarative experiment configuration, stored as TOML.

A config names its sequences by expressions in ``n`` (see
:mod:`abssum.expr`), its method by a registry name and its checks by id.
``parse(render(cfg)) == cfg`` for every valid config.
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .summability import VARIANTS

CHECKS = ("hypotheses", "lemma", "matrix-conditions", "index", "decomposition", "fourier")
SERIES_KINDS = ("a", "t", "fourier")
FOURIER_FUNCTIONS = ("sawtooth", "square", "triangle", "sin", "cos", "custom")
_METHOD = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([^()]*?)\s*\))?\s*$")
METHODS = ("weighted_mean", "identity", "cesaro", "custom", "random")


@dataclass(frozen=True)
class SeriesSpec:
    """Where the series ``a_n`` (n >= 1) comes from.

    ``kind = "a"`` gives ``a_n`` directly; ``kind = "t"`` prescribes its
    (C,1) mean ``t_n`` and inverts it; ``kind = "fourier"`` takes
    ``a_n = C_n(x)`` of a library function (``m`` is the frequency of
    ``sin``/``cos``, ``path`` the sample file of ``custom``).
    """

    kind: str = "a"
    expr: str = ""
    function: str = ""
    x: float = 0.0
    m: float = 1.0
    path: str = ""


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    series: SeriesSpec
    factor: str = "1/(n+1)"
    majorant: str = "log(n+2)"
    weights: str = "1"
    method: str = "weighted_mean"
    variant: str = "quasi-f"
    k: float = 1.0
    alpha: float = 1.0
    sigma: float = 0.5
    beta: float = 0.0
    N: int = 2000
    checks: tuple[str, ...] = ("hypotheses", "lemma", "matrix-conditions", "index", "decomposition")
    out: str = "out"
    tol: float = 1e-10
    scenario: str = ""

    def validate(self) -> "ExperimentConfig":
        """Return ``self`` or raise :class:`ConfigError` naming the field."""
        _check_number("k", self.k)
        if not self.k >= 1:
            raise ConfigError(f"k must satisfy k >= 1, got {self.k}", "k")
        _check_number("sigma", self.sigma)
        if not 0 < self.sigma < 1:
            raise ConfigError(f"sigma must lie in (0, 1), got {self.sigma}", "sigma")
        _check_number("beta", self.beta)
        if not self.beta >= 0:
            raise ConfigError(f"beta must be non-negative, got {self.beta}", "beta")
        _check_number("alpha", self.alpha)
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}", "alpha")
        if isinstance(self.N, bool) or not isinstance(self.N, int) or self.N < 2:
            raise ConfigError(f"N must be an integer >= 2, got {self.N!r}", "N")
        _check_number("tol", self.tol)
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}", "tol")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {', '.join(VARIANTS)}", "variant")
        bad = [c for c in self.checks if c not in CHECKS]
        if bad:
            raise ConfigError(f"unknown check {bad[0]!r}; choose from {', '.join(CHECKS)}", "checks")
        if len(set(self.checks)) != len(self.checks):
            raise ConfigError("checks must not repeat", "checks")
        parse_method(self.method)
        for name in ("factor", "majorant", "weights"):
            _check_expr(name, getattr(self, name))
        s = self.series
        if s.kind not in SERIES_KINDS:
            raise ConfigError(f"kind must be one of {', '.join(SERIES_KINDS)}", "series.kind")
        if s.kind == "fourier":
            if s.function not in FOURIER_FUNCTIONS:
                raise ConfigError(f"unknown function {s.function!r}; choose from {', '.join(FOURIER_FUNCTIONS)}",
                                  "series.function")
            if not -math.pi <= s.x <= math.pi:
                raise ConfigError(f"x must lie in [-pi, pi], got {s.x}", "series.x")
            if s.function == "custom" and not s.path:
                raise ConfigError("custom function needs a sample file", "series.path")
        else:
            _check_expr("series.expr", s.expr)
            if "fourier" in self.checks:
                raise ConfigError("the fourier check needs a fourier series", "checks")
        return self


def _check_number(name: str, value) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {value!r}", name)


def _check_expr(name: str, text) -> None:
    from .expr import parse

    if not isinstance(text, str) or not text.strip():
        raise ConfigError("expected a non-empty expression in n", name)
    try:
        parse(text)
    except ConfigError as exc:
        raise ConfigError(str(exc), name) from None


def parse_method(text: str) -> tuple[str, str | None]:
    """Split ``"cesaro(0.5)"`` into ``("cesaro", "0.5")`` and check the name."""
    m = _METHOD.match(text) if isinstance(text, str) else None
    if not m or m.group(1) not in METHODS:
        raise ConfigError(f"unknown method {text!r}; choose from weighted_mean, identity, cesaro(alpha), "
                          "custom(file), random(seed)", "method")
    name, arg = m.group(1), m.group(2)
    needs_arg = name in ("cesaro", "custom", "random")
    if needs_arg and not arg:
        raise ConfigError(f"{name} needs an argument", "method")
    if not needs_arg and arg:
        raise ConfigError(f"{name} takes no argument", "method")
    if name == "cesaro":
        try:
            a = float(arg)
        except ValueError:
            raise ConfigError(f"cesaro order must be a number, got {arg!r}", "method") from None
        if not 0 < a <= 1:
            raise ConfigError(f"cesaro order must lie in (0, 1], got {a}", "method")
    if name == "random" and not re.fullmatch(r"\d+", arg):
        raise ConfigError(f"random seed must be a non-negative integer, got {arg!r}", "method")
    return name, arg


# ------------------------------------------------------------ TOML round trip


def to_dict(cfg: ExperimentConfig) -> dict[str, Any]:
    d = asdict(cfg)
    d["checks"] = list(cfg.checks)
    d["series"] = {k: v for k, v in d["series"].items() if v != getattr(SeriesSpec(), k) or k == "kind"}
    return d


def from_dict(data: dict[str, Any]) -> ExperimentConfig:
    data = dict(data)
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError("unknown key", unknown[0])
    if "name" not in data:
        raise ConfigError("missing", "name")
    series = data.get("series")
    if not isinstance(series, dict):
        raise ConfigError("expected a [series] table", "series")
    series = dict(series)
    s_known = {f.name for f in fields(SeriesSpec)}
    s_unknown = sorted(set(series) - s_known)
    if s_unknown:
        raise ConfigError("unknown key", f"series.{s_unknown[0]}")
    for key in ("x", "m"):
        if key in series and isinstance(series[key], int) and not isinstance(series[key], bool):
            series[key] = float(series[key])
    data["series"] = SeriesSpec(**series)
    for key in ("k", "alpha", "sigma", "beta", "tol"):
        if isinstance(data.get(key), int) and not isinstance(data[key], bool):
            data[key] = float(data[key])
    if "checks" in data:
        if not isinstance(data["checks"], list):
            raise ConfigError("expected a list of check names", "checks")
        data["checks"] = tuple(data["checks"])
    return ExperimentConfig(**data).validate()


def render(cfg: ExperimentConfig) -> str:
    return tomli_w.dumps(to_dict(cfg))


def parse(text: str) -> ExperimentConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}", "config") from None
    return from_dict(data)


def load(path: str | Path) -> ExperimentConfig:
    return parse(Path(path).read_text())


def override(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    """``replace`` that skips ``None`` values and re-validates."""
    return replace(cfg, **{k: v for k, v in changes.items() if v is not None}).validate()


# ------------------------------------------------------------------ presets

_ALL = ("hypotheses", "lemma", "matrix-conditions", "index", "decomposition")

PRESETS: dict[str, ExperimentConfig] = {
    "thm23-weighted": ExperimentConfig(
        name="thm23-weighted",
        series=SeriesSpec(kind="t", expr="(-1)^n"),
        weights="n+1",
        method="weighted_mean",
        variant="quasi-f",
        k=2.0,
        sigma=0.5,
        beta=1.0,
        checks=_ALL,
        scenario="weighted mean a_nv = p_v/P_n: quasi-f-power increasing majorant, |N,p_n|_k factor theorem",
    ),
    "thm22-sigma": ExperimentConfig(
        name="thm22-sigma",
        series=SeriesSpec(kind="t", expr="(-1)^n"),
        weights="n+1",
        method="weighted_mean",
        variant="quasi-sigma",
        k=1.5,
        sigma=0.5,
        beta=0.0,
        checks=_ALL,
        scenario="weighted mean with beta = 0: quasi-sigma-power increasing majorant",
    ),
    "abs-A-k": ExperimentConfig(
        name="abs-A-k",
        series=SeriesSpec(kind="t", expr="(-1)^n"),
        weights="1",
        method="cesaro(0.5)",
        variant="quasi-f",
        k=1.5,
        alpha=0.5,
        sigma=0.5,
        beta=1.0,
        checks=_ALL,
        scenario="p_n = 1 with the Cesaro(1/2) matrix: |A|_k summability (a_nn = O(1/n) fails for order < 1)",
    ),
    "C1-k": ExperimentConfig(
        name="C1-k",
        series=SeriesSpec(kind="t", expr="(-1)^n"),
        weights="1",
        method="weighted_mean",
        variant="quasi-f",
        k=2.0,
        sigma=0.5,
        beta=1.0,
        checks=_ALL,
        scenario="weighted mean with p_n = 1: |C,1|_k summability",
    ),
    "fourier-sawtooth": ExperimentConfig(
        name="fourier-sawtooth",
        series=SeriesSpec(kind="fourier", function="sawtooth", x=1.0),
        weights="1",
        method="weighted_mean",
        variant="quasi-f",
        k=1.0,
        sigma=0.5,
        beta=1.0,
        N=1000,
        checks=("hypotheses", "lemma", "index", "fourier"),
        scenario="Fourier series of f(t) = t at x = 1 under the weighted mean",
    ),
}


def list_presets() -> list[tuple[str, str]]:
    """``(name, scenario)`` pairs in registry order."""
    return [(name, cfg.scenario) for name, cfg in PRESETS.items()]


def resolve(spec: str) -> ExperimentConfig:
    """A preset name or a path to a TOML file."""
    if spec in PRESETS:
        return PRESETS[spec]
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"no preset or file named {spec!r}", "config")
    return load(path)
