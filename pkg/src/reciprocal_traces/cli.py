"""Command-line front end: ``traces``, ``series``, ``theta`` and ``verify``.

Exit codes: 0 success, 1 a verification check failed, 2 usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import checks
from .modfuncs import build_series
from .numerics import PrecisionContext, QExpansion
from .theta import shadow_combination, theta_binary_4, theta_unary
from .traces import generating_series

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

_COMPLEX = re.compile(r"^\s*([+-]?\d*\.?\d+(?:[eE][+-]?\d+)?)\s*([+-])\s*(\d*\.?\d+(?:[eE][+-]?\d+)?)\s*[ij]\s*$")


class UsageError(ValueError):
    pass


def parse_tau(text: str) -> complex:
    """Parse ``a+bi`` (decimal parts); the imaginary part must be positive."""
    m = _COMPLEX.match(text)
    if not m:
        raise UsageError(f"cannot parse complex number {text!r}; expected a+bi")
    re_part, sign, im_part = m.groups()
    tau = complex(float(re_part), float(im_part) * (1 if sign == "+" else -1))
    if tau.imag <= 0:
        raise UsageError("tau must have positive imaginary part")
    return tau


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    precision_digits: int = 60
    d_min: int = -200
    tau: complex | None = None
    cutoff: float | None = None
    output_format: str = "json"
    output_path: str | None = None
    target: str | None = None
    name: str = "j"
    order: int = 10

    def context(self) -> PrecisionContext:
        return PrecisionContext(self.precision_digits, lattice_cutoff=self.cutoff)


def _fmt(ctx: PrecisionContext, x, digits: int | None = None) -> str:
    return ctx.mp.nstr(x, digits or ctx.precision_digits)


def cmd_traces(cfg: RunConfig) -> tuple[list[dict], dict, int]:
    ctx = cfg.context()
    rows = []
    for entry in generating_series(cfg.d_min, ctx, reconstruct=True):
        target = checks.GENERATING_SERIES_TARGETS.get(entry.D)
        rows.append({
            "D": entry.D,
            "value": _fmt(ctx, entry.value, 30),
            "rational": "" if entry.rational_guess is None else str(entry.rational_guess),
            "classes": entry.class_count,
            "provenance": "paper_target" if target is not None else "computed",
        })
    return rows, {"d_min": cfg.d_min}, EXIT_OK


def cmd_series(cfg: RunConfig) -> tuple[list[dict], dict, int]:
    ctx = cfg.context()
    series = build_series(cfg.name, ctx, order=cfg.order)
    parts = series.parts if not isinstance(series, QExpansion) else (series,)
    rows = []
    for power, part in enumerate(parts):
        for e in part.exponents:
            c = part[e]
            rows.append({"name": cfg.name, "t_power": power, "exponent": str(e),
                         "coefficient": str(c) if isinstance(c, (int, Fraction)) else _fmt(ctx, c),
                         "provenance": "computed"})
    return rows, {"name": cfg.name, "order": cfg.order}, EXIT_OK


def _theta_row(ctx, name, h, tv) -> dict:
    return {"function": name, "h": h, "re": _fmt(ctx, tv.value.real, 30), "im": _fmt(ctx, tv.value.imag, 30),
            "cutoff": tv.cutoff, "tail_bound": tv.tail_bound, "provenance": "computed"}


def cmd_theta(cfg: RunConfig) -> tuple[list[dict], dict, int]:
    ctx = cfg.context()
    tau = cfg.tau if cfg.tau is not None else 1j
    rows = []
    for h in range(3):
        rows.append(_theta_row(ctx, "theta_3/2", h, theta_unary(Fraction(3, 2), h, tau, ctx)))
        rows.append(_theta_row(ctx, "theta_7/2", h, theta_unary(Fraction(7, 2), h, tau, ctx)))
        rows.append(_theta_row(ctx, "theta_4", h, theta_binary_4(h, tau, ctx)))
    s = shadow_combination(tau, ctx)
    rows.append({"function": "shadow", "h": "", "re": _fmt(ctx, s.real, 30), "im": _fmt(ctx, s.imag, 30),
                 "cutoff": "", "tail_bound": "", "provenance": "computed"})
    return rows, {"tau": [tau.real, tau.imag]}, EXIT_OK


def cmd_verify(cfg: RunConfig) -> tuple[list[dict], dict, int]:
    ctx = cfg.context()
    results = checks.TARGETS[cfg.target](ctx, cfg.tau)
    rows = [r.as_row() for r in results]
    ok = all(r.passed for r in results)
    return rows, {"target": cfg.target, "all_pass": ok}, EXIT_OK if ok else EXIT_FAILED


COMMANDS = {"traces": cmd_traces, "series": cmd_series, "theta": cmd_theta, "verify": cmd_verify}


def _render(rows: list[dict], meta: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"rows": rows, "meta": meta}, indent=2, default=str) + "\n"
    buf = io.StringIO()
    if rows:
        fields = ["D", "value", "rational", "classes"] if "classes" in rows[0] else list(rows[0])
        writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\r\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=60, help="working precision in decimal digits")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--cutoff", type=float, help="override the lattice cutoff radius")
    common.add_argument("--tau", help="point in the upper half-plane, written a+bi")

    parser = argparse.ArgumentParser(prog="reciprocal-traces", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    p = sub.add_parser("traces", parents=[common], help="traces of 1/j for d_min <= D <= 0")
    p.add_argument("--dmin", type=int, default=-200)
    p = sub.add_parser("series", parents=[common], help="q-expansion coefficients of a modular form")
    p.add_argument("--name", choices=("E2*", "E4", "E6", "Delta", "j"), default="j")
    p.add_argument("--order", type=int, default=10)
    sub.add_parser("theta", parents=[common], help="theta functions and the shadow combination at tau")
    p = sub.add_parser("verify", parents=[common], help="run a group of numerical checks")
    p.add_argument("target", choices=sorted(checks.TARGETS))
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    if args.prec < 30:
        raise UsageError("--prec must be at least 30")
    dmin = getattr(args, "dmin", -200)
    if dmin >= 0:
        raise UsageError("--dmin must be negative")
    if args.cutoff is not None and args.cutoff <= 0:
        raise UsageError("--cutoff must be positive")
    return RunConfig(
        subcommand=args.subcommand, precision_digits=args.prec, d_min=dmin,
        tau=parse_tau(args.tau) if args.tau is not None else None, cutoff=args.cutoff,
        output_format=args.format, output_path=args.out, target=getattr(args, "target", None),
        name=getattr(args, "name", "j"), order=getattr(args, "order", 10),
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = _config(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows, meta, code = COMMANDS[cfg.subcommand](cfg)
    except (ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    meta = {"precision_digits": cfg.precision_digits, "cutoff": cfg.cutoff, **meta}
    text = _render(rows, meta, cfg.output_format)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
