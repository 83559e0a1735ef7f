from __future__ import annotations

import dataclasses

import pytest

from abssum import cli
from abssum.config import (
    PRESETS,
    ExperimentConfig,
    SeriesSpec,
    list_presets,
    override,
    parse,
    parse_method,
    render,
    resolve,
)
from abssum.errors import ConfigError


def small(name: str, N: int = 120) -> ExperimentConfig:
    return override(PRESETS[name], N=N)


# ------------------------------------------------------------------ config


def test_presets_cover_every_reduction_in_stable_order():
    names = [n for n, _ in list_presets()]
    assert names[:4] == ["thm23-weighted", "thm22-sigma", "abs-A-k", "C1-k"]
    assert names == [n for n, _ in list_presets()]
    assert PRESETS["thm22-sigma"].variant == "quasi-sigma"
    assert PRESETS["abs-A-k"].weights == "1" and PRESETS["abs-A-k"].method != "weighted_mean"
    assert PRESETS["C1-k"].weights == "1" and PRESETS["C1-k"].method == "weighted_mean"


@pytest.mark.parametrize("name", list(PRESETS))
def test_preset_round_trip(name):
    cfg = PRESETS[name]
    text = render(cfg)
    assert parse(text) == cfg
    assert render(parse(text)) == text


def test_integer_literals_are_accepted():
    text = render(PRESETS["C1-k"]).replace("k = 2.0", "k = 2")
    assert parse(text).k == 2.0


@pytest.mark.parametrize(
    "change, field",
    [
        ({"k": 0.5}, "k"),
        ({"sigma": 1.0}, "sigma"),
        ({"beta": -1.0}, "beta"),
        ({"N": 1}, "N"),
        ({"variant": "strange"}, "variant"),
        ({"checks": ("hypotheses", "plots")}, "checks"),
        ({"method": "cesaro(2)"}, "method"),
        ({"method": "bogus"}, "method"),
        ({"factor": "1/(n+"}, "factor"),
        ({"series": SeriesSpec(kind="fourier", function="wave")}, "series.function"),
        ({"series": SeriesSpec(kind="fourier", function="sawtooth", x=4.0)}, "series.x"),
        ({"checks": ("fourier",)}, "checks"),
    ],
)
def test_validation_names_the_field(change, field):
    with pytest.raises(ConfigError) as err:
        dataclasses.replace(PRESETS["C1-k"], **change).validate()
    assert err.value.field == field
    assert str(err.value).startswith(field)


def test_k_message_cites_the_bound():
    with pytest.raises(ConfigError, match="k >= 1"):
        override(PRESETS["C1-k"], k=0.5)


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError) as err:
        parse("colour = 'red'\n" + render(PRESETS["C1-k"]))
    assert err.value.field == "colour"
    with pytest.raises(ConfigError) as err:
        parse(render(PRESETS["C1-k"]) + "colour = 'red'\n")
    assert err.value.field == "series.colour"
    with pytest.raises(ConfigError):
        parse("not toml = = 1")


def test_method_names():
    assert parse_method("weighted_mean") == ("weighted_mean", None)
    assert parse_method("cesaro(0.5)") == ("cesaro", "0.5")
    assert parse_method("random(12)") == ("random", "12")
    assert parse_method("custom(rows.csv)") == ("custom", "rows.csv")
    for bad in ("identity(3)", "random(x)", "cesaro()"):
        with pytest.raises(ConfigError):
            parse_method(bad)


def test_resolve_file_and_missing(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text(render(PRESETS["abs-A-k"]))
    assert resolve(str(path)) == PRESETS["abs-A-k"]
    with pytest.raises(ConfigError):
        resolve(str(tmp_path / "absent.toml"))


# --------------------------------------------------------------------- run


def test_run_writes_reports(tmp_path):
    status = cli.run(small("thm23-weighted", 1000), tmp_path)
    assert status == 0
    for name in ("ledger.csv", "hypotheses.csv", "decomposition.csv", "summary.txt"):
        assert (tmp_path / name).exists()
    summary = (tmp_path / "summary.txt").read_text()
    assert "scenario: weighted mean" in summary
    assert "overall: consistent-with-bounded" in summary


@pytest.mark.parametrize("name", list(PRESETS))
def test_runs_are_byte_identical(tmp_path, name):
    cfg = small(name, 80 if name == "fourier-sawtooth" else 120)
    cli.run(cfg, tmp_path / "a")
    cli.run(cfg, tmp_path / "b")
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_abs_A_k_reports_diagonal_condition(tmp_path):
    cli.run(small("abs-A-k", 400), tmp_path)
    rows = {line.split(",")[0]: line.split(",")[-1] for line in (tmp_path / "hypotheses.csv").read_text().splitlines()[2:]}
    assert rows["diagonal-vs-weight"] == "diverging"
    assert rows["index-sum"] == "consistent-with-bounded"
    assert "cesaro-index-sum" in rows


def test_main_list_and_show(capsys):
    assert cli.main(["list-presets"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("thm23-weighted")
    assert cli.main(["show", "C1-k"]) == 0
    assert parse(capsys.readouterr().out) == PRESETS["C1-k"]


def test_main_check_only(tmp_path, capsys):
    status = cli.main(["check", "C1-k", "--only", "hypotheses", "--N", "1000", "--out", str(tmp_path)])
    assert status == 0
    assert not (tmp_path / "ledger.csv").exists()
    assert "checks: hypotheses" in capsys.readouterr().out


def test_main_reports_config_errors(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text(render(PRESETS["C1-k"]).replace("k = 2.0", "k = 0.5"))
    assert cli.main(["run", str(path), "--out", str(tmp_path)]) == 2
    assert "k >= 1" in capsys.readouterr().err
    assert cli.main(["check", "C1-k", "--only", "fourier", "--out", str(tmp_path)]) == 2
    assert cli.main(["run", "C1-k", "--N", "1", "--out", str(tmp_path)]) == 2
