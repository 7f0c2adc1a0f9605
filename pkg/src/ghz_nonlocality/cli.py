"""Command-line front end.

Exit codes: 0 ok, 1 usage error, 2 invalid state parameters, 3 failed
verification.  Errors are a single stderr line ``error code=<n> kind=<kind>
message=<text>``.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import sys

from . import __version__, acceptance, regions
from .bell import BUILTIN_NAMES, FacetSyntaxError, builtin, load, render
from .constants import ConstantSyntaxError, parse_constant
from .entanglement import cgm_closed_form, classify
from .optimize import DEFAULT_MAX_SWEEPS, DEFAULT_STARTS, DEFAULT_TOL, SETTINGS, seesaw
from .states import InvalidStateError, density_matrix, violated_constraint

EXIT_OK, EXIT_USAGE, EXIT_STATE, EXIT_VERIFY = 0, 1, 2, 3

_ANALYTIC = {
    "mermin": regions.mermin_max,
    "sliwa15": regions.l15_max,
    "svetlichny": regions.svetlichny_max,
    "bancal99": regions.ns99_max,
}


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str):
        super().__init__(message)
        self.code, self.kind = code, kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, "usage", message)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".12g")
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        return float(format(v, ".12g"))
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, list):
        return [_json_value(x) for x in v]
    return v


def _metadata(args, **extra) -> dict:
    meta = {"tool": "ghz-nonlocality", "version": __version__, "command": args.command}
    for key in ("seed", "starts", "tol", "max_sweeps"):
        if hasattr(args, key):
            meta[key] = getattr(args, key)
    meta.update(extra)
    if not args.no_timestamp:
        meta["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    return meta


def _write_records(args, out, records: list[dict], fields: list[str], **meta) -> None:
    metadata = _metadata(args, **meta)
    if args.format == "json":
        payload = {"metadata": metadata, "results": [_json_value(r) for r in records]}
        json.dump(payload, out, indent=1)
        out.write("\n")
        return
    for k, v in metadata.items():
        out.write(f"# {k}: {_fmt(v)}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(fields)
    for r in records:
        writer.writerow([_fmt(r.get(f)) for f in fields])


def _state_args(args) -> tuple[float, float]:
    try:
        p, q = parse_constant(args.p), parse_constant(args.q)
    except ConstantSyntaxError as exc:
        raise CliError(EXIT_USAGE, "bad_constant", str(exc)) from None
    return p, q


def _require_state(p: float, q: float) -> None:
    bad = violated_constraint(p, q)
    if bad is not None:
        raise CliError(EXIT_STATE, "invalid_state", f"(p={p!r}, q={q!r}) violates {bad}")


def cmd_validate(args, out) -> int:
    p, q = _state_args(args)
    bad = violated_constraint(p, q)
    rec = {"p": p, "q": q, "valid": bad is None, "violated": bad or ""}
    _write_records(args, out, [rec], ["p", "q", "valid", "violated"])
    return EXIT_OK if bad is None else EXIT_STATE


def cmd_classify(args, out) -> int:
    p, q = _state_args(args)
    _require_state(p, q)
    rec = {"p": p, "q": q, "ent_class": classify(p, q).value, "cgm": cgm_closed_form(p, q)}
    _write_records(args, out, [rec], ["p", "q", "ent_class", "cgm"])
    return EXIT_OK


def _report_records(reports) -> list[dict]:
    out = []
    for r in reports:
        d = regions.report_dict(r)
        d["witnesses"] = "|".join(r.witnesses)
        if "warnings" in d:
            d["warnings"] = "|".join(d["warnings"])
        out.append(d)
    return out


def cmd_report(args, out) -> int:
    p, q = _state_args(args)
    _require_state(p, q)
    r = regions.report(p, q, numeric=args.numeric, starts=args.starts, tol=args.tol, seed=args.seed)
    if args.format == "json":
        rec = regions.report_dict(r)
    else:
        rec = _report_records([r])[0]
    _write_records(args, out, [rec], list(regions.CSV_FIELDS) + ["warnings"])
    return EXIT_OK


def _load_expression(spec: str):
    try:
        return load(spec)
    except FacetSyntaxError as exc:
        raise CliError(EXIT_USAGE, "facet_syntax", str(exc)) from None
    except OSError as exc:
        raise CliError(EXIT_USAGE, "facet_file", f"cannot read {spec!r}: {exc.strerror}") from None


def cmd_maximize(args, out) -> int:
    p, q = _state_args(args)
    _require_state(p, q)
    expr = _load_expression(args.ineq)
    res = seesaw(
        density_matrix(p, q), expr, starts=args.starts, tol=args.tol, seed=args.seed,
        max_sweeps=args.max_sweeps, absolute=args.absolute,
    )
    analytic = _ANALYTIC[args.ineq](p, q) if args.ineq in _ANALYTIC else None
    rec = {
        "inequality": expr.name,
        "p": p,
        "q": q,
        "numeric": res.value,
        "analytic": analytic,
        "bound": expr.bound,
        "violated": res.value > expr.bound,
        "converged": res.converged,
        "warning": "" if res.converged else "sweep limit reached before tolerance",
    }
    for name, d in zip(SETTINGS, res.scenario.directions):
        rec[f"{name}_theta"] = d.theta
        rec[f"{name}_phi"] = d.phi
    fields = list(rec)
    _write_records(args, out, [rec], fields, absolute=args.absolute)
    return EXIT_OK


def _parse_steps(text: str) -> tuple[int, int]:
    try:
        if "x" in text:
            a, b = text.lower().split("x")
            return int(a), int(b)
        return int(text), int(text)
    except ValueError:
        raise CliError(EXIT_USAGE, "usage", f"bad --steps {text!r}; expected N or PxQ") from None


def cmd_scan(args, out) -> int:
    p_steps, q_steps = _parse_steps(args.steps)
    if p_steps < 2 or q_steps < 2:
        raise CliError(EXIT_USAGE, "usage", "--steps needs at least 2 points per axis")
    reports = regions.scan(
        p_steps, q_steps, args.mode, starts=args.starts, tol=args.tol, seed=args.seed,
        include_invalid=args.include_invalid,
    )
    meta = _metadata(args, steps=f"{p_steps}x{q_steps}", mode=args.mode)
    if args.mode == "both":
        meta["discrepancies_over_1e-5"] = len(regions.discrepancies(reports, 1e-5))
    if args.format == "json":
        regions.write_json(reports, out, meta)
    else:
        regions.write_csv(reports, out, {k: _fmt(v) for k, v in meta.items()})
    return EXIT_OK


def cmd_verify(args, out) -> int:
    numbers = None
    if args.only:
        try:
            numbers = sorted({int(x) for x in args.only.split(",")})
        except ValueError:
            raise CliError(EXIT_USAGE, "usage", f"bad --only {args.only!r}") from None
        unknown = [n for n in numbers if n not in acceptance.CRITERIA]
        if unknown:
            raise CliError(EXIT_USAGE, "usage", f"unknown criteria {unknown}")
    meta = _metadata(args)
    if args.format == "json":
        results = acceptance.run_all(seed=args.seed, starts=args.starts, tol=args.tol, numbers=numbers)
        json.dump({"metadata": meta, "criteria": [r.__dict__ for r in results]}, out, indent=1)
        out.write("\n")
    else:
        for k, v in meta.items():
            out.write(f"# {k}: {_fmt(v)}\n")
        results = acceptance.run_all(
            seed=args.seed, starts=args.starts, tol=args.tol, numbers=numbers,
            on_result=lambda r: (out.write(r.line() + "\n"), out.flush()),
        )
        failed = [r.number for r in results if not r.passed]
        out.write(f"# summary: {len(results) - len(failed)}/{len(results)} passed" + (f"; failed {failed}\n" if failed else "\n"))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def cmd_render_expr(args, out) -> int:
    expr = _load_expression(args.ineq)
    if not args.no_metadata:
        for k, v in _metadata(args).items():
            out.write(f"# {k}: {_fmt(v)}\n")
    out.write(render(expr))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-o", "--output", help="write to this file instead of standard output")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp metadata line")

    state = _Parser(add_help=False)
    state.add_argument("-p", required=True, help="p as a constant expression, e.g. 1/2")
    state.add_argument("-q", required=True, help="q as a constant expression, e.g. sqrt3/4")

    def numeric_options(seed: int = 0) -> _Parser:
        # a fresh parent per subcommand; shared actions would share defaults
        numeric = _Parser(add_help=False)
        numeric.add_argument("--starts", type=int, default=DEFAULT_STARTS)
        numeric.add_argument("--seed", type=int, default=seed)
        numeric.add_argument("--tol", type=float, default=DEFAULT_TOL)
        return numeric

    parser = _Parser(prog="ghz-nonlocality", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("validate", parents=[common, state], help="check the state constraints")
    sub.add_parser("classify", parents=[common, state], help="entanglement class and C_GM")
    rp = sub.add_parser("report", parents=[common, state, numeric_options()], help="full nonlocality report for one state")
    rp.add_argument("--numeric", action="store_true", help="also run the see-saw for the four built-ins")

    mx = sub.add_parser("maximize", parents=[common, state, numeric_options()], help="see-saw maximum of one inequality")
    mx.add_argument("--ineq", required=True, help=f"builtin ({', '.join(BUILTIN_NAMES)}) or facet file")
    mx.add_argument("--max-sweeps", type=int, default=DEFAULT_MAX_SWEEPS)
    mx.add_argument("--absolute", action="store_true", help="maximise |expr| instead of expr")

    sc = sub.add_parser("scan", parents=[common, numeric_options()], help="region data over the (p, q) triangle")
    sc.add_argument("--steps", default="100x100", help="grid as N or PxQ")
    sc.add_argument("--mode", choices=("analytic", "numeric", "both"), default="analytic")
    sc.add_argument("--include-invalid", action="store_true", help="emit rows for points outside the triangle")

    vf = sub.add_parser("verify", parents=[common, numeric_options(seed=42)], help="run the acceptance criteria")
    vf.add_argument("--only", help="comma-separated criterion numbers")

    re_ = sub.add_parser("render-expr", parents=[common], help="print an inequality in facet file format")
    re_.add_argument("ineq", help="builtin name or facet file")
    re_.add_argument("--no-metadata", action="store_true")
    return parser


COMMANDS = {
    "validate": cmd_validate,
    "classify": cmd_classify,
    "report": cmd_report,
    "maximize": cmd_maximize,
    "scan": cmd_scan,
    "verify": cmd_verify,
    "render-expr": cmd_render_expr,
}


def _join_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``-q -1/(4*sqrt3)`` as ``-q=-1/(4*sqrt3)``.

    argparse only accepts a leading '-' in a value when it looks like a plain
    number, which rules out symbolic constants such as ``-1/(4*sqrt3)``.
    """
    out, i = [], 0
    while i < len(argv):
        if argv[i] in ("-p", "-q") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_join_negative_values(argv))
        if getattr(args, "starts", 1) < 1:
            raise CliError(EXIT_USAGE, "usage", "--starts must be >= 1")
        if getattr(args, "tol", 1.0) <= 0:
            raise CliError(EXIT_USAGE, "usage", "--tol must be positive")
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as out:
                return COMMANDS[args.command](args, out)
        return COMMANDS[args.command](args, sys.stdout)
    except CliError as exc:
        print(f"error code={exc.code} kind={exc.kind} message={exc}", file=sys.stderr)
        return exc.code
    except InvalidStateError as exc:
        print(f"error code={EXIT_STATE} kind=invalid_state message={exc}", file=sys.stderr)
        return EXIT_STATE
