"""Command-line front end: ``solve``, ``converge``, ``verify`` and ``repro``.

Exit status is 0 on success, 1 when an oracle check fails and 2 on invalid
input or a solver failure.  Outputs of runs that fail part way are written
with a ``.partial`` suffix.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import __version__
from .analysis import (
    convergence_sweep,
    exact_example1,
    exact_example2,
    theoretical_order,
)
from .errors import IntegrationError, SolverError
from .expr import KernelSyntaxError, parse
from .model import (
    InvalidKernelError,
    Kernel,
    ProblemSpec,
    constant_kernel,
    exp_convolution_kernel,
    kernel_bounds,
    make_grid,
)
from .quad import MIDPOINT
from .solver import SolverConfig, solve
from .verification import SUITES, run_suites

REPRO_M = (1.0, 1.5, 2.0, 10.0, 100.0, 1000.0)
REPRO_X = 0.001
REPRO_DEPTHS = tuple(range(1, 13))

BUILTIN_KERNELS = {
    "one": constant_kernel,
    "constant": constant_kernel,
    "exp-conv": exp_convolution_kernel,
    "expconv": exp_convolution_kernel,
}


class UsageError(ValueError):
    pass


def parse_kernel_expression(src: str, X: float = 1.0) -> Kernel:
    """Build a kernel from a built-in name or an expression in x and t.

    Expressions without variables become constant kernels.  Bounds are
    checked on [0, X]; nonpositive values raise InvalidKernelError.
    """
    src = src.strip()
    if src in BUILTIN_KERNELS:
        k = BUILTIN_KERNELS[src]()
    else:
        tree = parse(src)
        if not tree.variables:
            value = float(tree.evaluate(0.0, 0.0))
            if not value > 0:
                raise InvalidKernelError(f"constant kernel {src!r} = {value} is not positive")
            k = constant_kernel(value)
        else:
            def func(x, t, _tree=tree):
                x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
                with np.errstate(all="ignore"):
                    return np.asarray(_tree.evaluate(x, t), dtype=float)[()]

            k = Kernel(func=func, name=src, kind="expr")
    kernel_bounds(k, X)
    return k


@dataclass
class RunConfig:
    command: str
    kernel_source: str = "1"
    m: float = 2.0
    X: float = 1.0
    N: int = 8
    eval_point: float = REPRO_X
    richardson: bool = False
    output_path: Optional[str] = None
    example: Optional[int] = None
    suite: str = "all"
    max_depth: int = 12

    def validate(self):
        if self.N % 2 or self.N < 2:
            raise UsageError(f"--N must be an even integer >= 2, got {self.N}")
        if self.command == "solve" and not self.m > 0:
            raise UsageError("--m must be positive")
        if self.command == "converge" and self.example is None and self.eval_point > self.X:
            raise UsageError("--eval-point must not exceed --X")
        if self.example not in (None, 1, 2):
            raise UsageError("--example must be 1 or 2")
        if self.suite != "all" and self.suite not in SUITES:
            raise UsageError(f"--suite must be 'all' or one of {', '.join(SUITES)}")


_DEFAULT_OUT = {
    "solve": "solution.csv",
    "converge": "convergence.csv",
    "verify": "verify.csv",
    "repro": "repro.csv",
}


def _fmt(v: float) -> str:
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return f"{v:.15e}"


def _write(path: str, text: str, partial: bool = False):
    if partial:
        path = path + ".partial"
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _example_problem(example: int, m: float, X: float):
    if example == 1:
        return ProblemSpec(m=m, kernel=constant_kernel(1.0), X=X), lambda x: exact_example1(m, x)
    return ProblemSpec(m=m, kernel=exp_convolution_kernel(), X=X), lambda x: exact_example2(m, x)


def _exact_for(cfg: RunConfig, spec: ProblemSpec):
    if cfg.example is not None:
        return _example_problem(cfg.example, cfg.m, spec.X)[1]
    k = spec.kernel
    if k.kind == "const" and k.params[0] == 1.0:
        return lambda x: exact_example1(cfg.m, x)
    if k.kind == "expconv" or k.name.replace(" ", "") == "exp(x-t)":
        return lambda x: exact_example2(cfg.m, x)
    return None


def predicted_order(m: float, C: float, D: float) -> float:
    """Bound exponent for the midpoint scheme with the rectangle start."""
    return theoretical_order(m, MIDPOINT.W, D, C, 1.0 / m, 1.0 + 1.0 / m)


def cmd_solve(cfg: RunConfig) -> int:
    X = cfg.X
    spec = ProblemSpec(m=cfg.m, kernel=parse_kernel_expression(cfg.kernel_source, X), X=X)
    sol = solve(SolverConfig(spec=spec, grid=make_grid(X, cfg.N), richardson=cfg.richardson))
    u = np.power(sol.values, cfg.m + 1.0)
    buf = io.StringIO()
    buf.write(f"# kernel={spec.kernel.name}\n# m={_fmt(cfg.m)}\n# X={_fmt(X)}\n# N={cfg.N}\n")
    buf.write(f"# start={sol.meta['start']}\n# scheme={sol.meta['scheme']}\n")
    buf.write("n,x,y,u\n")
    for n, (x, y, uu) in enumerate(zip(sol.nodes, sol.values, u)):
        buf.write(f"{n},{_fmt(float(x))},{_fmt(float(y))},{_fmt(float(uu))}\n")
    _write(cfg.output_path, buf.getvalue())
    return 0


def cmd_converge(cfg: RunConfig) -> int:
    x_star = cfg.eval_point
    if cfg.example is not None:
        spec, exact = _example_problem(cfg.example, cfg.m, x_star)
    else:
        kernel = parse_kernel_expression(cfg.kernel_source, x_star)
        spec = ProblemSpec(m=cfg.m, kernel=kernel, X=x_star)
        exact = _exact_for(cfg, spec)
        if exact is None:
            raise UsageError("converge needs a kernel with a known solution (use --example)")
    report = convergence_sweep(
        spec, x_star, range(1, cfg.max_depth + 1), exact,
        richardson=cfg.richardson, theoretical=predicted_order(cfg.m, spec.C, spec.D),
    )
    _write(cfg.output_path, report.to_csv(), partial=report.failure is not None)
    return 2 if report.failure else 0


def _order_cell(v: Optional[float]) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "--"
    if math.isinf(v):
        return "inf"
    return f"{v:.3f}"


def repro_table(example: int, richardson: bool = False, m_values=REPRO_M,
                depths=REPRO_DEPTHS):
    """Fitted and predicted orders for one of the model problems.

    Returns ``(rows, failure)`` where rows map m to (fitted, predicted);
    a predicted order <= 0 is reported as None (no guarantee).
    """
    rows, failure = {}, None
    for m in m_values:
        spec, exact = _example_problem(example, m, REPRO_X)
        report = convergence_sweep(spec, REPRO_X, depths, exact, richardson=richardson)
        est = predicted_order(m, spec.C, spec.D)
        rows[m] = (report.fitted_order, est if est > 0 else None)
        if report.failure:
            failure = f"m={m}: {report.failure}"
            break
    return rows, failure


def cmd_repro(cfg: RunConfig) -> int:
    example = cfg.example or 1
    rows, failure = repro_table(example, richardson=cfg.richardson)
    ms = list(rows)
    buf = io.StringIO()
    buf.write(f"# example={example}\n# eval_point={_fmt(REPRO_X)}\n")
    buf.write(f"# depths={REPRO_DEPTHS[0]}..{REPRO_DEPTHS[-1]}\n")
    buf.write(f"# start={'richardson' if cfg.richardson else 'rectangle'}\n")
    buf.write("m," + ",".join(f"{m:g}" for m in ms) + "\n")
    buf.write("Order," + ",".join(_order_cell(rows[m][0]) for m in ms) + "\n")
    buf.write("Est. order," + ",".join(_order_cell(rows[m][1]) for m in ms) + "\n")
    buf.write("Order (full)," + ",".join(_fmt(rows[m][0]) for m in ms) + "\n")
    buf.write("Est. order (full)," + ",".join(
        "--" if rows[m][1] is None else _fmt(rows[m][1]) for m in ms) + "\n")
    if failure:
        buf.write(f"# failure={failure}\n")
    _write(cfg.output_path, buf.getvalue(), partial=failure is not None)
    return 2 if failure else 0


def cmd_verify(cfg: RunConfig) -> int:
    names = list(SUITES) if cfg.suite == "all" else [cfg.suite]
    results = run_suites(names)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["suite", "check", "status", "value", "limit"])
    for r in results:
        writer.writerow([r.suite, r.check, "pass" if r.passed else "FAIL", _fmt(r.value), _fmt(r.limit)])
    failed = [r for r in results if not r.passed]
    _write(cfg.output_path, buf.getvalue())
    for r in results:
        print(f"[{'PASS' if r.passed else 'FAIL'}] {r.suite}: {r.check} (value {r.value:.6g}, limit {r.limit:.6g})")
    return 1 if failed else 0


COMMANDS = {"solve": cmd_solve, "converge": cmd_converge, "verify": cmd_verify, "repro": cmd_repro}


def read_config_file(path: str) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


_ALIASES = {"kernel": "kernel_source", "out": "output_path"}


def _coerce(cfg_fields, raw: dict) -> dict:
    types = {f.name: f.type for f in cfg_fields}
    out = {}
    for key, value in raw.items():
        key = _ALIASES.get(key, key)
        if key not in types or key == "command":
            raise UsageError(f"unknown configuration key {key!r}")
        kind = types[key]
        if "bool" in str(kind):
            value = str(value).lower() in ("1", "true", "yes", "on")
        elif "int" in str(kind):
            value = int(value)
        elif "float" in str(kind):
            value = float(value)
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="powervolterra", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key=value file; flags override it")
        p.add_argument("--kernel", dest="kernel_source", help="built-in name or expression in x, t")
        p.add_argument("--m", type=float)
        p.add_argument("--X", type=float)
        p.add_argument("--N", type=int)
        p.add_argument("--eval-point", dest="eval_point", type=float)
        p.add_argument("--richardson", action="store_const", const=True, default=None)
        p.add_argument("--out", dest="output_path")
        p.add_argument("--example", type=int, choices=(1, 2))
        p.add_argument("--suite")
        p.add_argument("--max-depth", dest="max_depth", type=int)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(_coerce(fields(RunConfig), read_config_file(args.config)))
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None and f.name != "command":
            values[f.name] = v
    cfg = RunConfig(command=args.command, **values)
    if cfg.output_path is None:
        cfg.output_path = _DEFAULT_OUT[cfg.command]
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, KernelSyntaxError, InvalidKernelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, IntegrationError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
