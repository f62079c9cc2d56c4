"""Command-line driver: run check suites and print JSON or CSV reports, or evaluate one function.

    suq11 --suite comult --q 0.5 --format csv
    suq11 eval psi 0 0.3 0 --q 0.5
    suq11 eval ap +1 +2 +2
    suq11 eval fgf 1 0 +1 +0 +1          (F lattice points are powers of q^2)

Exit status: 0 when every check passes, 1 when a check fails, 2 on a
configuration or usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional, Sequence

from . import coassoc, coefficients, qseries
from .qlattice import LatticePoint, QParam
from .suites import SUITES, CheckReport, ConfigError, RunConfig, run_suite

CSV_HEADER = ("check", "params", "residual", "tolerance", "pass", "runtime_ms")
EVAL_ARITY = {"psi": 3, "poch": 2, "ap": 3, "fgf": 5}
_NUMBER_CHARS = set("0123456789+-.eEjJ")


# -- argument parsing ------------------------------------------------------------------


def parse_number(text: str, where: str) -> complex | float:
    """A real or complex literal; errors name the argument and the offending position."""
    for i, ch in enumerate(text):
        if ch not in _NUMBER_CHARS:
            raise ConfigError(f"{where}: unexpected character {ch!r} at position {i} in {text!r}")
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return complex(text)
    except ValueError:
        raise ConfigError(f"{where}: {text!r} is not a number (position 0)") from None


def parse_int(text: str, where: str) -> int:
    t = text.strip()
    for i, ch in enumerate(t):
        if not (ch.isdigit() or (i == 0 and ch in "+-")):
            raise ConfigError(f"{where}: unexpected character {ch!r} at position {i} in {text!r}")
    try:
        return int(t)
    except ValueError:
        raise ConfigError(f"{where}: {text!r} is not an integer (position 0)") from None


def parse_point(text: str, where: str) -> LatticePoint:
    """'+k' or '-k' meaning sign * base^k."""
    t = text.strip()
    if not t or t[0] not in "+-":
        raise ConfigError(f"{where}: lattice point must start with '+' or '-' (position 0) in {text!r}")
    if len(t) == 1:
        raise ConfigError(f"{where}: missing exponent at position 1 in {text!r}")
    for i, ch in enumerate(t[1:], start=1):
        if not (ch.isdigit() or (i == 1 and ch == "-")):
            raise ConfigError(f"{where}: unexpected character {ch!r} at position {i} in {text!r}")
    try:
        k = int(t[1:])
    except ValueError:
        raise ConfigError(f"{where}: bad exponent at position 1 in {text!r}") from None
    return LatticePoint(1 if t[0] == "+" else -1, k)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="suq11",
        description="Numerical checks for the quantum group SU_q(1,1)~.",
        epilog="Suites: " + ", ".join(SUITES + ("all",)) + ".  Expressions: eval psi a b z | poch a n | ap p x y | fgf k m p x y.",
    )
    d = RunConfig()
    ap.add_argument("expr", nargs="*", help="optional 'eval <function> <args...>'")
    ap.add_argument("--q", type=float, default=d.q, help="deformation parameter, 0 < q < 1 (default %(default)s)")
    ap.add_argument("--kmin", type=int, default=d.k_min, help="smallest exponent of the positive window")
    ap.add_argument("--kmax", type=int, default=d.k_max, help="largest exponent of the window")
    ap.add_argument("--negkmax", type=int, default=d.negative_k_max, help="largest exponent on the negative half-line")
    ap.add_argument("--mmax", type=int, default=d.mode_max, help="Fourier mode cutoff for truncated operators")
    ap.add_argument("--tol", type=float, default=None, help="override every asserted tolerance")
    ap.add_argument("--seed", type=int, default=d.seed, help="seed for randomized parameter draws")
    ap.add_argument("--format", choices=("json", "csv"), default=d.output_format)
    ap.add_argument("--suite", default="all", help="suite name or 'all' (default)")
    ap.add_argument("--growth", type=int, default=d.growth, help="extra lattice points per side for truncated sums")
    ap.add_argument("--no-timing", action="store_true", help="write runtime_ms as 0 so reports compare bit-for-bit")
    ap.add_argument("--figdir", default=None, help="also render PNG figures here (needs matplotlib)")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        q=ns.q,
        k_min=ns.kmin,
        k_max=ns.kmax,
        negative_k_max=ns.negkmax,
        mode_max=ns.mmax,
        tol=ns.tol,
        seed=ns.seed,
        output_format=ns.format,
        growth=ns.growth,
    )


# -- report serialisation --------------------------------------------------------------

# JSON Schema of the --format json document
REPORT_SCHEMA = {
    "type": "object",
    "required": ["config", "reports", "all_pass"],
    "additionalProperties": False,
    "properties": {
        "config": {
            "type": "object",
            "required": ["q", "k_min", "k_max", "negative_k_max", "mode_max", "tol", "seed", "output_format", "growth"],
            "properties": {
                "q": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "k_min": {"type": "integer"},
                "k_max": {"type": "integer"},
                "negative_k_max": {"type": "integer", "minimum": 1},
                "mode_max": {"type": "integer", "minimum": 0},
                "tol": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "seed": {"type": "integer"},
                "output_format": {"enum": ["json", "csv"]},
                "growth": {"type": "integer", "minimum": 0},
            },
        },
        "reports": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["check", "params", "residual", "tolerance", "pass", "runtime_ms"],
                "additionalProperties": False,
                "properties": {
                    "check": {"type": "string"},
                    "params": {"type": "object"},
                    "residual": {"type": ["number", "null"]},
                    "tolerance": {"type": ["number", "null"], "description": "null marks a report-only check"},
                    "pass": {"type": "boolean"},
                    "runtime_ms": {"type": "number", "minimum": 0},
                },
            },
        },
        "all_pass": {"type": "boolean"},
    },
}


def _finite_or_none(x: float) -> Optional[float]:
    return x if math.isfinite(x) else None


def report_record(rep: CheckReport, timing: bool = True) -> dict:
    """JSON-ready report; an infinite (report-only) tolerance is written as null."""
    d = rep.as_dict()
    d["residual"] = _finite_or_none(d["residual"])
    d["tolerance"] = _finite_or_none(d["tolerance"])
    if not timing:
        d["runtime_ms"] = 0.0
    return d


def to_json(config: RunConfig, reports: Sequence[CheckReport], timing: bool = True) -> str:
    doc = {
        "config": config.as_dict(),
        "reports": [report_record(r, timing) for r in reports],
        "all_pass": all(r.passed for r in reports),
    }
    return json.dumps(doc, indent=2, allow_nan=False)


def to_csv(reports: Sequence[CheckReport], timing: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow([
            r.check,
            json.dumps(r.params, sort_keys=True, allow_nan=False),
            repr(float(r.residual)),
            repr(float(r.tolerance)),
            "true" if r.passed else "false",
            repr(float(r.runtime_ms if timing else 0.0)),
        ])
    return buf.getvalue()


def read_csv(text: str) -> list[CheckReport]:
    """Inverse of to_csv."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError("missing or wrong CSV header")
    return [
        CheckReport(c, json.loads(p), float(res), float(tol), ok == "true", float(ms))
        for c, p, res, tol, ok, ms in rows[1:]
    ]


# -- eval ------------------------------------------------------------------------------


def evaluate(func: str, args: Sequence[str], q: float) -> qseries.SeriesValue:
    """Evaluate one expression; psi and poch take numbers, ap and fgf lattice points."""
    if func not in EVAL_ARITY:
        raise ConfigError(f"unknown function {func!r}; expected one of {', '.join(EVAL_ARITY)}")
    if len(args) != EVAL_ARITY[func]:
        raise ConfigError(f"eval {func} takes {EVAL_ARITY[func]} arguments, got {len(args)}")
    qp = QParam(q)
    where = [f"argument {i + 1} of {func}" for i in range(len(args))]
    if func == "psi":
        a, b, z = (parse_number(t, w) for t, w in zip(args, where))
        return qseries.psi(a, b, z, qp)
    if func == "poch":
        a = parse_number(args[0], where[0])
        n = parse_int(args[1], where[1])
        if n < 0:
            raise ConfigError(f"{where[1]}: n must be nonnegative")
        return qseries.SeriesValue(qseries.poch_finite(a, n, qp), 0.0, max(n, 1))
    if func == "ap":
        p, x, y = (parse_point(t, w) for t, w in zip(args, where))
        return coefficients.a_series(coefficients.APoint(p, x, y), qp)
    k = parse_int(args[0], where[0])
    m = parse_int(args[1], where[1])
    p, x, y = (parse_point(t, w) for t, w in zip(args[2:], where[2:]))
    return coassoc.fg_series(coassoc.FGIndex("F", k, m, p), x, y, qp)


def _value_json(v: complex | float) -> float | dict:
    if isinstance(v, complex):
        return v.real if v.imag == 0 else {"re": v.real, "im": v.imag}
    return float(v)


def format_value(sv: qseries.SeriesValue, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"value": _value_json(sv.value), "error_bound": sv.error_bound, "terms": sv.terms})
    v = sv.value
    return f"value,error_bound,terms\n{v!r},{sv.error_bound!r},{sv.terms}\n"


# -- main ------------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_intermixed_args(argv)
    except SystemExit as exc:  # argparse already printed the usage message
        return int(exc.code or 0) and 2
    try:
        config = config_from_args(ns)
        if ns.expr:
            if ns.expr[0] != "eval" or len(ns.expr) < 2:
                raise ConfigError("positional arguments must be 'eval <function> <args...>'")
            sv = evaluate(ns.expr[1], ns.expr[2:], config.q)
            print(format_value(sv, config.output_format).rstrip("\n"))
            return 0
        reports = run_suite(ns.suite, config)
    except (ConfigError, ValueError) as exc:
        print(f"suq11: error: {exc}", file=sys.stderr)
        return 2
    timing = not ns.no_timing
    out = to_json(config, reports, timing) if config.output_format == "json" else to_csv(reports, timing)
    sys.stdout.write(out if out.endswith("\n") else out + "\n")
    if ns.figdir:
        try:
            from . import figures
        except ImportError as exc:
            print(f"suq11: error: --figdir needs matplotlib ({exc})", file=sys.stderr)
            return 2
        for path in figures.render(reports, ns.figdir):
            print(f"suq11: wrote {path}", file=sys.stderr)
    return 0 if all(r.passed for r in reports) else 1


if __name__ == "__main__":
    sys.exit(main())
