import csv

import numpy as np
import pytest

from powervolterra.cli import RunConfig, UsageError, main, parse_kernel_expression, repro_table
from powervolterra.expr import KernelSyntaxError, parse
from powervolterra.model import InvalidKernelError


@pytest.mark.parametrize(
    "src,x,t,expected",
    [
        ("1 + 2 * 3", 0, 0, 7.0),
        ("-x^2", 3.0, 0.0, -9.0),
        ("2^3^2", 0, 0, 512.0),
        ("(1 + x) * t", 2.0, 0.5, 1.5),
        ("exp(x - t)", 1.0, 1.0, 1.0),
        ("pow(x, 2) / sqrt(t)", 3.0, 4.0, 4.5),
        ("log(exp(2.5e0))", 0, 0, 2.5),
        ("x - t - 1", 5.0, 1.0, 3.0),
    ],
)
def test_expression_values(src, x, t, expected):
    assert float(parse(src).evaluate(x, t)) == pytest.approx(expected)


@pytest.mark.parametrize(
    "src,pos",
    [("1 +", 3), ("x * $", 4), ("(x", 2), ("foo(x)", 0), ("y + 1", 0), ("exp(x, t)", 0), ("2 3", 2)],
)
def test_expression_errors_carry_position(src, pos):
    with pytest.raises(KernelSyntaxError) as info:
        parse(src)
    assert info.value.pos == pos


def test_parse_kernel_expression_variants():
    assert parse_kernel_expression("one").kind == "const"
    assert parse_kernel_expression("exp-conv").kind == "expconv"
    k = parse_kernel_expression("2 * 1.5")
    assert k.kind == "const" and k.params == (3.0,)
    k = parse_kernel_expression("1 + x * t")
    assert k.kind == "expr" and float(k(0.5, 0.5)) == 1.25
    with pytest.raises(InvalidKernelError):
        parse_kernel_expression("x - t")
    with pytest.raises(InvalidKernelError):
        parse_kernel_expression("0 - 1")


def read_rows(path):
    with open(path) as fh:
        return list(csv.reader(line for line in fh if not line.startswith("#")))


def test_solve_command(tmp_path):
    out = tmp_path / "sol.csv"
    assert main(["solve", "--kernel", "1", "--m", "1", "--N", "8", "--richardson", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert rows[0] == ["n", "x", "y", "u"]
    data = np.array(rows[1:], dtype=float)
    assert data.shape == (9, 4)
    np.testing.assert_allclose(data[:, 2], data[:, 1] / 2, atol=1e-15)
    np.testing.assert_allclose(data[:, 3], data[:, 2] ** 2, atol=1e-15)
    assert "# start=richardson" in out.read_text()


def test_solve_command_expression_kernel(tmp_path):
    out = tmp_path / "sol.csv"
    assert main(["solve", "--kernel", "exp(x - t)", "--m", "2", "--N", "16", "--out", str(out)]) == 0
    assert len(read_rows(out)) == 18


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--N", "7"],
        ["solve", "--kernel", "x - t"],
        ["solve", "--kernel", "exp(x"],
        ["solve", "--m", "-1"],
        ["converge", "--kernel", "1 + x"],
        ["verify", "--suite", "nope"],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path / "o.csv")]) == 2
    assert "error" in capsys.readouterr().err


def test_converge_command(tmp_path):
    out = tmp_path / "conv.csv"
    assert main(["converge", "--example", "2", "--m", "2", "--max-depth", "8", "--out", str(out)]) == 0
    text = out.read_text()
    rows = read_rows(out)
    assert rows[0] == ["h", "N", "error", "log10_h", "log10_error"]
    assert len(rows) == 9
    fitted = float(next(l for l in text.splitlines() if l.startswith("# fitted_order=")).split("=")[1])
    assert 0.9 < fitted < 1.2
    assert "# theoretical_order=" in text


def test_converge_builtin_kernel_without_example(tmp_path):
    out = tmp_path / "conv.csv"
    assert main(["converge", "--kernel", "exp(x - t)", "--m", "2", "--max-depth", "4", "--out", str(out)]) == 0


def test_verify_command_single_suite(tmp_path, capsys):
    out = tmp_path / "v.csv"
    assert main(["verify", "--suite", "zeta", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert rows[0] == ["suite", "check", "status", "value", "limit"]
    assert all(r[2] == "pass" for r in rows[1:])
    assert "[PASS]" in capsys.readouterr().out


def test_repro_table_estimated_orders():
    rows, failure = repro_table(1, m_values=(1.0, 2.0, 10.0), depths=range(1, 6))
    assert failure is None
    assert rows[1.0][1] is None
    assert rows[2.0][1] == pytest.approx(0.5)
    assert rows[10.0][1] == pytest.approx(0.9)


def test_repro_command_layout(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["repro", "--example", "2", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert [r[0] for r in rows] == ["m", "Order", "Est. order", "Order (full)", "Est. order (full)"]
    assert rows[0][1:] == ["1", "1.5", "2", "10", "100", "1000"]
    # the kernel exp(x - t) has D = e^0.001 on [0, 0.001]
    assert rows[2][1:] == ["--", "0.332", "0.499", "0.900", "0.990", "0.999"]


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    out = tmp_path / "sol.csv"
    cfg.write_text("# comment\nkernel = 1\nm = 1\nN = 4\nrichardson = true\n")
    assert main(["solve", "--config", str(cfg), "--N", "6", "--out", str(out)]) == 0
    text = out.read_text()
    assert "# N=6" in text and "# m=1.0" in text
    assert len(read_rows(out)) == 8


def test_config_file_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "o.csv")]) == 2


def test_run_config_validate():
    with pytest.raises(UsageError):
        RunConfig(command="solve", N=3).validate()
    with pytest.raises(UsageError):
        RunConfig(command="converge", X=0.5, eval_point=1.0).validate()
    RunConfig(command="solve").validate()


def test_solve_output_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["solve", "--kernel", "exp-conv", "--m", "10", "--N", "64", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
