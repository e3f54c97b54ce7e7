"""Batch front door: build, analyze, enumerate, search, verify.

Exit codes: 0 on success, 2 when verify finds a failing applicable clause,
1 on any error.  All outputs are deterministic; table output is rendered
from the same dict that the JSON serializer writes.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import constructions, core, formats, maxclass, thin
from .errors import GradalgError, ParseError

ENV_CAP = "GRADALG_MAX_DEGREE"
DEFAULT_CAP = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _degree_cap() -> int:
    raw = os.environ.get(ENV_CAP)
    if raw is None:
        return DEFAULT_CAP
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"{ENV_CAP} must be an integer, got {raw!r}")


def _emit(payload: dict, args) -> None:
    text = formats.dumps(payload) if args.format == "json" else _render_table(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_table(obj, indent=0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for key in sorted(obj):
            val = obj[key]
            if isinstance(val, (dict, list)) and val:
                lines.append(f"{pad}{key}:")
                lines.append(_render_table(val, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(val)}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(_render_table(item, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(item)}")
    else:
        lines.append(f"{pad}{_scalar(obj)}")
    return "\n".join(line for line in lines if line) + ("\n" if indent == 0 else "")


def _scalar(val) -> str:
    if val is None:
        return "-"
    if isinstance(val, bool):
        return "yes" if val else "no"
    if isinstance(val, (dict, list)) and not val:
        return "(none)"
    return str(val)


def _analysis_dict(a: core.GradedAlgebra) -> dict:
    canon, change = core.canonical_form(a)
    seq = maxclass.centralizer_sequence(canon)
    seqstr = formats.format_centralizers(
        [pt.coeffs if pt.is_point() else pt.kind for pt in seq])
    out = {
        "char": canon.p,
        "dims": list(canon.dims) + ([0] if canon.terminated else []),
        "generator_change": [list(row) for row in change],
        "centralizers": seqstr,
    }
    top = canon.top
    covering = thin.check_covering(canon, top if canon.terminated else top - 1)
    k = thin.second_diamond(canon)
    if covering is not None:
        out["classification"] = f"covering fails at degree {covering[0]}"
    elif k is None:
        out["classification"] = "maximal class (thin by convention excluded)"
    else:
        out["classification"] = f"thin (second diamond at degree {k})"
    if all(pt.is_point() or pt.kind == "all" for pt in seq):
        ana = maxclass.constituent_lengths(seq, canon.p)
        out["constituents"] = {
            "metabelian": ana.metabelian,
            "qbar": ana.qbar, "q": ana.q, "e": ana.e,
            "lengths": list(ana.lengths),
            "trailing": ana.trailing,
            "distinct_centralizers": ana.distinct_centralizers,
        }
        if ana.metabelian:
            out["summary"] = "metabelian; no constituents"
        else:
            out["summary"] = (f"constituents {ana.qbar},"
                              f"{list(ana.lengths)} trailing {ana.trailing}")
    else:
        out["constituents"] = None
    out["metabelian"] = maxclass.is_metabelian_through(canon, top + 1)
    out["metabelian_through_6"] = (
        maxclass.is_metabelian_through(canon, 6) if top >= 5 else None)
    if top < 3 or canon.dims[2] == 1:
        out["diamonds"] = [
            {"degree": rep.degree, "genuine": rep.genuine, "mu": str(rep.mu)}
            for rep in thin.diamond_scan(canon)]
    else:
        out["diamonds"] = None
    return out


def cmd_build(args) -> int:
    p = args.char
    if (args.pattern is None) == (args.seq is None):
        raise ParseError("build needs exactly one of --pattern or --seq")
    if args.pattern is not None:
        qbar, lengths = formats.parse_pattern(args.pattern)
        total = args.dim - 3 if args.dim else None
        points = formats.pattern_to_centralizers(qbar, lengths, total)
        a = maxclass.from_centralizers(points, p, terminated=True)
    else:
        a = maxclass.from_centralizers(args.seq, p, terminated=True)
    if args.dim and (sum(a.dims) != args.dim):
        raise ParseError(f"built dimension {sum(a.dims)} != requested {args.dim}")
    _emit(formats.algebra_to_dict(a), args)
    return 0


def cmd_analyze(args) -> int:
    a = formats.load_algebra(args.infile)
    _emit(_analysis_dict(a), args)
    return 0


def cmd_enumerate(args) -> int:
    cap = _degree_cap()
    report = maxclass.enumerate_maxclass(args.char, args.max_degree,
                                         palette=args.palette,
                                         workers=args.workers, cap=cap)
    _emit(report.to_dict(), args)
    return 0


def cmd_search(args) -> int:
    cap = _degree_cap()
    result = thin.thin_search(args.char, args.target_k, args.max_degree,
                              qbar=args.qbar, branch_limit=args.branch_limit,
                              workers=args.workers, cap=cap)
    _emit(result.to_dict(), args)
    return 0


def cmd_verify(args) -> int:
    a = formats.load_algebra(args.infile)
    report = thin.verify_structure_theorem(a)
    _emit(report.to_dict(), args)
    return 2 if report.failing() else 0


def _build_parser() -> _Parser:
    ap = _Parser(prog="gradalg",
                 description="Construct, analyze, enumerate and verify "
                             "2-generated graded Lie algebras over F_p.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=("json", "table"), default="json")

    sp = sub.add_parser("build", help="build an algebra from a pattern or sequence")
    sp.add_argument("--char", type=int, required=True)
    sp.add_argument("--pattern", help='constituent pattern, e.g. "Q=8: 8,7,8^2,7"')
    sp.add_argument("--seq", help='centralizer string, e.g. "y^6 x y^6 x"')
    sp.add_argument("--dim", type=int, help="total dimension (truncates/extends)")
    common(sp)
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("analyze", help="analyze an algebra JSON file")
    sp.add_argument("--in", dest="infile", required=True)
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("enumerate", help="enumerate maximal-class prefixes")
    sp.add_argument("--char", type=int, required=True)
    sp.add_argument("--max-degree", type=int, required=True)
    sp.add_argument("--palette", choices=("two", "all"), default="two")
    sp.add_argument("--workers", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("search", help="search for thin algebras")
    sp.add_argument("--char", type=int, required=True)
    sp.add_argument("--target-k", type=int, required=True)
    sp.add_argument("--max-degree", type=int, required=True)
    sp.add_argument("--qbar", type=int, default=None)
    sp.add_argument("--branch-limit", type=int, default=100000)
    sp.add_argument("--workers", type=int, default=1)
    common(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("verify", help="verify the structure statements on a witness")
    sp.add_argument("--in", dest="infile", required=True)
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except GradalgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
