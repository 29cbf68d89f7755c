"""Command-line entry point.

Exit codes: 0 success, 1 a checked assertion failed, 2 bad input,
3 a time or window cap stopped the computation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from .duality import (dual_norm_with_functional, envelope_decomposition_search,
                      envelope_gauge, extreme_point_count, extreme_points,
                      witness_to_json)
from .experiments import EXPERIMENTS, run_experiment
from .family import FamilyError, SetFamily, family_from_generator, index_set, parse_pieces
from .norms import (InfeasibleError, SolverLimitExceeded, norm_lower, norm_upper_exact,
                    norm_upper_greedy, sup_norm)
from .vector import SparseVector, fmt_q

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class InputError(Exception):
    pass


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {path}: {exc}") from None


def load_vector(path: str) -> SparseVector:
    data = _load_json(path)
    try:
        if isinstance(data, list):
            return SparseVector.from_dense(Fraction(str(v)) for v in data)
        return SparseVector.from_json(data)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad vector in {path}: {exc}") from None


def load_family(path: str) -> SetFamily:
    data = _load_json(path)
    try:
        return SetFamily.from_json(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad family in {path}: {exc}") from None


def _generator_spec(args) -> dict:
    spec = {"generator": args.generator}
    if args.window is not None:
        spec["window"] = args.window
    if args.n is not None:
        spec["n"] = args.n
    if args.order is not None:
        spec["order"] = args.order
    if args.pieces is not None:
        spec["pieces"] = parse_pieces(args.pieces)
    if args.parts is not None:
        try:
            spec["parts"] = json.loads(args.parts)
        except json.JSONDecodeError as exc:
            raise InputError(f"--parts is not JSON: {exc}") from None
    return spec


# rendering ---------------------------------------------------------------

def _csv(rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _render(payload: dict, fmt: str, table: list[list], text: list[str]) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        return _csv(table)
    return "\n".join(text) + "\n"


# commands ----------------------------------------------------------------

def cmd_family(args) -> tuple[int, str]:
    family = family_from_generator(_generator_spec(args))
    maximal = family.maximal_sets()
    payload = family.to_json()
    payload.update({
        "members": len(family),
        "maximal_sets": [list(s) for s in maximal],
        "hereditary": family.is_hereditary,
        "covers_window": family.covers_window,
    })
    table = [["set"]] + [[" ".join(map(str, s))] for s in family.sets]
    text = [f"window {family.window}, {len(family)} members (including the empty set)",
            f"{len(maximal)} maximal sets:"] + [f"  {list(s)}" for s in maximal]
    return EXIT_OK, _render(payload, args.format, table, text)


def cmd_norm(args) -> tuple[int, str]:
    x = load_vector(args.vector)
    family = load_family(args.family)
    payload = {"which": args.which}
    code = EXIT_OK
    if args.max_support is not None and len(x.support) > args.max_support:
        raise InputError(f"support has {len(x.support)} points, over --max-support {args.max_support}")
    if args.which == "lower":
        payload["value"] = fmt_q(norm_lower(x, family))
    elif args.which == "sup":
        payload["value"] = fmt_q(sup_norm(x))
    elif args.which == "greedy":
        value, cert = norm_upper_greedy(x, family)
        payload.update(value=fmt_q(value), certificate=cert.to_json())
    else:
        limit = args.time_cap_ms / 1000 if args.time_cap_ms else None
        try:
            value, cert = norm_upper_exact(x, family, time_limit=limit)
            payload.update(status="exact", value=fmt_q(value), certificate=cert.to_json())
        except SolverLimitExceeded as exc:
            payload.update(status="incomplete", lower=fmt_q(exc.lower), upper=fmt_q(exc.upper),
                           certificate=exc.certificate.to_json())
            code = EXIT_CAP
    table = [["which", "value"], [args.which, payload.get("value", "")]]
    text = [f"{args.which}: {payload.get('value', '')}"]
    if "certificate" in payload:
        text.append("pieces: " + " | ".join(str(p) for p in payload["certificate"]["pieces"]))
    if payload.get("status") == "incomplete":
        table = [["which", "lower", "upper"], [args.which, payload["lower"], payload["upper"]]]
        text = [f"{args.which}: incomplete, value in [{payload['lower']}, {payload['upper']}]"]
    return code, _render(payload, args.format, table, text)


def cmd_dualnorm(args) -> tuple[int, str]:
    y = load_vector(args.vector)
    family = load_family(args.family)
    value, functional = dual_norm_with_functional(y, family)
    gauge, witness = envelope_gauge(y, family)
    payload = {
        "dual_norm": fmt_q(value),
        "norming_functional": functional.to_json(),
        "envelope": witness_to_json(gauge, witness),
        "strong_duality": value == gauge,
    }
    if args.parts:
        payload["decomposition_search"] = {
            "parts": args.parts,
            "value": fmt_q(envelope_decomposition_search(y, family, args.parts)),
        }
    table = [["dual_norm", "envelope"], [fmt_q(value), fmt_q(gauge)]]
    text = [f"dual norm: {fmt_q(value)}", f"envelope: {fmt_q(gauge)}"]
    text += [f"  {fmt_q(w)} x {list(p.base)} {list(p.signs)}" for w, p in witness]
    return (EXIT_OK if value == gauge else EXIT_FAIL), _render(payload, args.format, table, text)


def cmd_extremes(args) -> tuple[int, str]:
    family = load_family(args.family)
    restrict = None if args.restrict is None else index_set(int(v) for v in args.restrict.split(",") if v)
    points = extreme_points(family, restrict)
    payload = {"count": len(points), "points": [p.to_json() for p in points]}
    if restrict is None:
        payload["expected_count"] = extreme_point_count(family)
    table = [["set", "signs"]] + [[" ".join(map(str, p.base)), " ".join(map(str, p.signs))] for p in points]
    text = [f"{len(points)} extreme points"] + [f"  {list(p.base)} {list(p.signs)}" for p in points]
    return EXIT_OK, _render(payload, args.format, table, text)


def cmd_experiment(args) -> tuple[int, str]:
    params = {
        "window": args.window, "n": args.n, "m": args.m, "max_n": args.max_n,
        "count": args.count, "trials": args.trials, "seed": args.seed,
        "family": args.family, "max_support": args.max_support,
        "time_cap_ms": args.time_cap_ms, "parts": args.parts,
    }
    report = run_experiment(args.name, **params)
    code = {"pass": EXIT_OK, "fail": EXIT_FAIL, "incomplete": EXIT_CAP}[report["status"]]
    table = [["check", "ok"]] + [[c["name"], "pass" if c["ok"] else "fail"] for c in report["checks"]]
    text = [f"{report['experiment']}: {report['status']}"]
    text += [f"  {'PASS' if c['ok'] else 'FAIL'} {c['name']}" for c in report["checks"]]
    if "reason" in report:
        text.append(f"  stopped: {report['reason']}")
    return code, _render(report, args.format, table, text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combnorm",
        description="Exact family norms, partition quasi-norms and their duals.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--max-support", type=int, default=None)
    common.add_argument("--time-cap-ms", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    fam = sub.add_parser("family", parents=[common], help="generate a family")
    fam.add_argument("generator", help="schreier, schreier-order, partition, tree or sum")
    fam.add_argument("--window", type=int)
    fam.add_argument("--n", type=int)
    fam.add_argument("--order", type=int)
    fam.add_argument("--pieces", help='pieces like "1;2,3"')
    fam.add_argument("--parts", help="JSON list of generator specs for sum")
    fam.set_defaults(func=cmd_family)

    norm = sub.add_parser("norm", parents=[common], help="evaluate a norm")
    norm.add_argument("vector", help="vector JSON path, or - for stdin")
    norm.add_argument("family", help="family JSON path (explicit sets or a generator spec)")
    norm.add_argument("--which", choices=("lower", "upper", "sup", "greedy"), default="upper")
    norm.set_defaults(func=cmd_norm)

    dual = sub.add_parser("dualnorm", parents=[common], help="dual and envelope norms")
    dual.add_argument("vector")
    dual.add_argument("family")
    dual.add_argument("--parts", type=int, default=0,
                      help="also run the decomposition search with this many parts")
    dual.set_defaults(func=cmd_dualnorm)

    ext = sub.add_parser("extremes", parents=[common], help="list extreme points")
    ext.add_argument("family")
    ext.add_argument("--restrict", help="comma-separated indices to project onto")
    ext.set_defaults(func=cmd_extremes)

    exp = sub.add_parser("experiment", parents=[common], help="run a named experiment")
    exp.add_argument("name", choices=EXPERIMENTS)
    exp.add_argument("--window", type=int)
    exp.add_argument("--n", type=int)
    exp.add_argument("--m", type=int)
    exp.add_argument("--max-n", type=int)
    exp.add_argument("--count", type=int)
    exp.add_argument("--trials", type=int)
    exp.add_argument("--family")
    exp.add_argument("--parts", type=int)
    exp.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for flag in ("max_support", "time_cap_ms"):
        value = getattr(args, flag, None)
        if value is not None and value <= 0:
            parser.error(f"--{flag.replace('_', '-')} must be positive")
    try:
        code, output = args.func(args)
    except (InputError, FamilyError, InfeasibleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(output)
    else:
        sys.stdout.write(output)
    return code


if __name__ == "__main__":
    sys.exit(main())
