#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
命令行测试：网格语法、CSV 输出、退出码与 models 子命令
"""

import csv
import io
import logging
import math
from logging.handlers import RotatingFileHandler

import numpy as np
import pytest
import yaml
from pydantic import BaseModel

from subordinatorDensity.cli.commands import build_run, parse_grid, parse_ladder, parse_orders
from subordinatorDensity.cli.main import build_argparser, main
from subordinatorDensity.cli.writers import format_cell, render_csv, write_csv, write_svg
from subordinatorDensity.errors import ConfigError
from subordinatorDensity.models import MODEL_REGISTRY, from_levy_density
from subordinatorDensity.utils.unified_logging import reset_unified_logging

logger = logging.getLogger("test_cli")

EULER_GAMMA = 0.5772156649015329


@pytest.fixture(autouse=True)
def isolated_logging(tmp_path, monkeypatch):
    """日志写到临时目录，测试结束后拆掉 main 装上的处理器"""
    monkeypatch.setenv("SUBDENS_LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.delenv("SUBDENS_CONFIG", raising=False)
    reset_unified_logging()
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RotatingFileHandler) or type(handler) is logging.StreamHandler:
            root.removeHandler(handler)
            handler.close()
    reset_unified_logging()


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_grid():
    logger.info("=== 测试网格语法 ===")
    assert parse_grid("0.5,1,2") == [0.5, 1.0, 2.0]
    assert parse_grid("1:3:3") == [1.0, 2.0, 3.0]
    assert parse_grid("1:100:3:log") == pytest.approx([1.0, 10.0, 100.0])
    assert parse_grid("0:1:2:linear") == [0.0, 1.0]
    for bad in ("", "1:2", "a,b", "0:1:3:log", "1:2:0", "1:2:3:cubic"):
        with pytest.raises(ConfigError):
            parse_grid(bad)


def test_parse_orders_and_ladder():
    assert parse_orders(None, [1, 2, 3]) == [1, 2, 3]
    assert parse_orders(None, [2]) == [2]
    assert parse_orders("2", [1, 2, 3]) == [2]
    assert parse_orders("1,3", [2]) == [1, 3]
    assert parse_orders("1:3", [2]) == [1, 2, 3]
    assert parse_orders("1:2,5", [2]) == [1, 2, 5]
    for bad in ("0", "x", "", "3:1", "1:2:3", "0:2"):
        with pytest.raises(ConfigError):
            parse_orders(bad, [1])
    assert parse_ladder("0.2:3") == pytest.approx([0.2, 0.1, 0.05])
    assert parse_ladder("0.1,0.05") == [0.1, 0.05]
    with pytest.raises(ConfigError):
        parse_ladder("a:b")


def test_build_run_merges_options():
    args = build_argparser().parse_args(["coeffs", "--model", "gamma", "--x", "1,2", "--abs-tol", "1e-9",
                                         "--psi", "0.4", "--eps-scheme", "truncate", "--eps-ladder", "0.1:4"])
    run, settings = build_run(args)
    assert run.methods == ["m2"]
    assert run.orders == [1, 2, 3]
    assert run.x_grid == [1.0, 2.0]
    assert settings.quadrature.abs_tol == 1e-9
    assert settings.contour.psi == 0.4
    assert settings.epsilon.kind == "truncate"
    assert settings.epsilon.ladder == pytest.approx([0.1, 0.05, 0.025, 0.0125])


def test_build_run_rejects_bad_options():
    parser = build_argparser()
    with pytest.raises(ConfigError):
        build_run(parser.parse_args(["coeffs", "--x", "-1"]))
    with pytest.raises(ConfigError):
        build_run(parser.parse_args(["coeffs", "--method", "bogus"]))
    with pytest.raises(ConfigError):
        build_run(parser.parse_args(["density", "--format", "svg"]))


def test_coeffs_command_writes_csv(capsys):
    logger.info("=== 测试 coeffs 子命令 ===")
    code = main(["coeffs", "--model", "gamma", "--method", "m3,oracle", "--n", "1:2", "--x", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.splitlines()[0] == "x,n,method,value,error_estimate,diagnostic"
    rows = read_csv(out)
    assert [(r["n"], r["method"]) for r in rows] == [("1", "m3"), ("1", "oracle"), ("2", "m3"), ("2", "oracle")]
    expected = 2.0 * EULER_GAMMA * math.exp(-1.0)
    for row in rows:
        if row["n"] == "2":
            assert float(row["value"]) == pytest.approx(expected, rel=1e-8)
        assert row["diagnostic"] == ""


@pytest.mark.parametrize("argv,methods,expected,tol", [
    (["--model", "stable:alpha=0.5", "--method", "m2"], ["m2"], 0.0, 1e-9),
    (["--model", "gamma", "--method", "m2,m3"], ["m2", "m3"], 2.0 * EULER_GAMMA * math.exp(-1.0), 1e-6),
    (["--model", "ig", "--method", "oracle", "--n", "3"], ["oracle"], 0.0, 1e-12),
])
def test_coeffs_single_order(argv, methods, expected, tol, capsys):
    logger.info(f"=== 测试单个阶数: {argv} ===")
    if "--n" not in argv:
        argv = argv + ["--n", "2"]
    assert main(["coeffs"] + argv + ["--x", "1"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert [r["method"] for r in rows] == methods
    assert len({r["n"] for r in rows}) == 1
    for row in rows:
        assert float(row["value"]) == pytest.approx(expected, rel=tol, abs=tol)


def test_density_output_is_deterministic(tmp_path):
    logger.info("=== 测试输出的确定性 ===")
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        argv = ["density", "--model", "ig", "--method", "contour,oracle", "--x", "1,2", "--t", "1", "--out", str(path)]
        assert main(argv) == 0
    first, second = (p.read_bytes() for p in paths)
    assert first == second
    assert b"\r" not in first and first.endswith(b"\n")
    rows = read_csv(first.decode("utf-8"))
    assert [r["method"] for r in rows] == ["contour", "oracle"] * 2
    assert float(rows[0]["value"]) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-9)


def test_svg_side_output(tmp_path):
    csv_path, svg_path = tmp_path / "p.csv", tmp_path / "p.svg"
    argv = ["density", "--model", "gamma", "--method", "contour", "--x", "0.5:2:4", "--t", "2",
            "--out", str(csv_path), "--svg", str(svg_path)]
    assert main(argv) == 0
    assert csv_path.exists()
    text = svg_path.read_text(encoding="utf-8")
    assert "<svg" in text


def test_convergence_command(tmp_path):
    out = tmp_path / "ladder.csv"
    argv = ["convergence", "--model", "gamma", "--eps-scheme", "semigroup", "--n", "2", "--x", "1", "--out", str(out)]
    assert main(argv) == 0
    rows = read_csv(out.read_text(encoding="utf-8"))
    assert len(rows) == 7
    assert rows[0]["eps"] == format_cell(0.2)
    final = rows[-1]
    assert float(final["eps"]) == 0.0
    assert float(final["u_n_eps"]) == pytest.approx(2.0 * EULER_GAMMA * math.exp(-1.0), rel=1e-6)
    assert all(float(r["cancellation_condition_number"]) >= 1.0 for r in rows)


def test_compare_command(tmp_path):
    out = tmp_path / "compare.csv"
    argv = ["compare", "--model", "ig", "--method", "m3,oracle,contour", "--x", "1", "--t", "1", "--n", "1",
            "--out", str(out)]
    assert main(argv) == 0
    rows = read_csv(out.read_text(encoding="utf-8"))
    methods = [r["method"] for r in rows]
    assert "oracle_deviation" in methods
    deviations = [float(r["value"]) for r in rows if r["method"] == "oracle_deviation"]
    assert max(deviations) < 1e-8


def test_models_command(capsys):
    assert main(["models"]) == 0
    listed = yaml.safe_load(capsys.readouterr().out)
    assert {m["name"] for m in listed} == {"stable", "gamma", "ig"}


@pytest.mark.parametrize("argv,code", [
    (["coeffs", "--model", "foo"], 2),
    (["coeffs", "--model", "stable:alpha=2"], 2),
    (["coeffs", "--method", "bogus"], 2),
    (["density", "--method", "m2"], 2),
    (["convergence", "--method", "m2"], 2),
    (["coeffs", "--model", "gamma", "--method", "oracle", "--n", "22", "--x", "1"], 4),
    (["convergence", "--model", "ig", "--eps-scheme", "power_tilt", "--n", "2"], 4),
])
def test_exit_codes(argv, code, capsys):
    logger.info(f"=== 测试退出码: {argv} ===")
    assert main(argv) == code
    if code == 2:
        assert "错误" in capsys.readouterr().err


class BareParams(BaseModel):
    """只有 Lévy 密度的 Gamma(1, 1)"""


def test_capability_exit_code(monkeypatch, capsys):
    logger.info("=== 测试方法不适用时的退出码 ===")
    bare = from_levy_density("bare", lambda x: np.exp(-x) / x, 0.0, tail_decay_rate=1.0)
    monkeypatch.setitem(MODEL_REGISTRY, "bare", (BareParams, lambda params: bare))
    assert main(["coeffs", "--model", "bare", "--method", "m3", "--n", "1", "--x", "1"]) == 3
    assert "没有解析延拓" in capsys.readouterr().err
    assert main(["density", "--model", "bare", "--method", "series-oracle", "--x", "1"]) == 3


def test_format_cell():
    assert format_cell(None) == ""
    assert format_cell(3) == "3"
    assert format_cell(True) == "true"
    assert format_cell(1.0) == "1.0000000000000000e+00"
    assert format_cell(math.nan) == "nan"
    assert format_cell(-math.inf) == "-inf"
    assert format_cell("m2") == "m2"
    value = 0.1 + 0.2
    assert float(format_cell(value)) == value


def test_writers(tmp_path, capsys):
    text = render_csv(("a", "b"), [(1, None), (2.5, "x,y")])
    assert text == 'a,b\n1,\n2.5000000000000000e+00,"x,y"\n'
    path = tmp_path / "nested" / "out.csv"
    assert write_csv(str(path), ("a",), [(1,)]) == "a\n1\n"
    assert path.read_text(encoding="utf-8") == "a\n1\n"
    write_csv(None, ("a",), [(2,)])
    assert capsys.readouterr().out == "a\n2\n"
    svg = tmp_path / "empty.svg"
    write_svg(str(svg), {"none": ([1.0], [None])}, "x", "y")
    assert svg.exists()


if __name__ == "__main__":
    pytest.main([__file__])
