"""``hallpath`` command line: act, verify, matrix, rewrite, psi, coeffs."""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from fractions import Fraction

from . import combinatorics as cb
from .checker import Config, report_json, sign_constants, verify
from .eha import psi_act, psi_coeffs, psi_exponential, psi_rational
from .polyrep import (InvalidState, State, TruncationOverflow, TruncationPolicy, Vect, apply_word,
                      enumerate_states)
from .qtfield import PoleError
from .rewriter import ScopeError, oracle_equal, special_expr, to_special
from .words import LevelError, ParseError, parse_word

EXIT_FAIL = 1
EXIT_USAGE = 2


class CliError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_json_arg(text: str):
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)


def _parse_lambda(text: str) -> cb.Partition:
    text = text.strip().strip("()[]")
    return cb.Partition(int(p) for p in re.split(r"[,\s]+", text) if p) if text else cb.Partition()


def _parse_point(text: str) -> tuple[Fraction, Fraction]:
    vals = {}
    for part in text.split(","):
        name, _, val = part.partition("=")
        vals[name.strip()] = Fraction(val.strip())
    if set(vals) != {"q", "t"}:
        raise CliError("--params needs exactly q=<rational>,t=<rational>")
    return vals["q"], vals["t"]


def _config(args) -> Config:
    point = _parse_point(args.params) if getattr(args, "params", None) else None
    fast = point is not None or getattr(args, "fast", False)
    cfg = Config(N=args.degree_cap, K=args.level_cap, M=getattr(args, "series_order", 6),
                 seed=getattr(args, "seed", 0), point=point, fast=fast)
    if cfg.N < 1 or cfg.K < 1 or cfg.M < 0:
        raise CliError("need N >= 1, K >= 1, M >= 0")
    return cfg


# ---------------------------------------------------------------------------

def cmd_act(args) -> int:
    w = parse_word(args.word)
    if args.state:
        s = State.from_json(_read_json_arg(args.state))
    else:
        s = State("0", _parse_lambda(args.lam or ""), ())
    v = Vect.basis(s)
    if v.level is not None and v.level != w.source:
        raise LevelError(f"word starts at level {w.source} but the state lives at level {s.level}")
    res = apply_word(w, v, TruncationPolicy(args.degree_cap, args.level_cap))
    if args.format == "text":
        _emit(f"{res}\n", args.out)
    else:
        _emit(_dump({"word": str(w), "state": s.to_json(), "result": res.to_json()}), args.out)
    return 0


def cmd_verify(args) -> int:
    cfg = _config(args)
    selectors = [s.strip() for s in args.relations.split(",") if s.strip()]
    reports = verify(cfg, selectors, args.workers)
    if not reports:
        raise CliError(f"no relation matches {args.relations!r}")
    text = report_json(cfg, reports)
    _emit(text, args.out)
    counts = {k: sum(r["status"] == k for r in reports) for k in ("pass", "fail", "skipped")}
    s, s2 = sign_constants()
    print(f"pass={counts['pass']} fail={counts['fail']} skipped={counts['skipped']} s={s} s'={s2}",
          file=sys.stderr)
    for r in reports:
        if r["status"] == "fail":
            print(f"FAIL {r['id']} {json.dumps(r['params'], sort_keys=True)}", file=sys.stderr)
    return 0 if counts["fail"] == 0 and counts["skipped"] == 0 else EXIT_FAIL


_PSI = re.compile(r"psi([+-])\[(\d+)\]")


def cmd_matrix(args) -> int:
    N = args.degree_cap
    m = _PSI.fullmatch(args.operator.strip())
    if m:
        sign, n = m.group(1), int(m.group(2))
        if args.level != 0:
            raise CliError("psi operators live at level 0")
        cols = enumerate_states(0, N)

        def image(s):
            return psi_act(sign, n, Vect.basis(s))
        source = target = 0
    else:
        w = parse_word(args.operator, args.level)
        source, target = w.source, w.target
        policy = TruncationPolicy(N, args.level_cap)
        cols = enumerate_states(source, N - w.margin()) if N >= w.margin() else ()

        def image(s):
            return apply_word(w, Vect.basis(s), policy)
    rows: dict = {}
    entries = []
    for j, s in enumerate(cols):
        try:
            img = image(s)
        except TruncationOverflow:
            continue
        for s2, c in img.items():
            key = s2
            if key not in rows:
                rows[key] = len(rows)
            entries.append([rows[key], j, str(c)])
    row_states = sorted(rows, key=rows.get)
    doc = {"operator": args.operator, "source": source, "target": target, "N": N,
           "rows": [s.to_json() for s in row_states], "cols": [s.to_json() for s in cols],
           "entries": entries}
    _emit(_dump(doc), args.out)
    return 0


def cmd_rewrite(args) -> int:
    w = parse_word(args.word)
    result = to_special(w)
    expr = special_expr(result, w.source)
    policy = TruncationPolicy(args.degree_cap, args.level_cap)
    checked = oracle_equal(w, expr, policy)
    if args.format == "text":
        lines = [f"({c}) * {t}" for t, c in result] or ["0"]
        _emit("\n".join(lines) + f"\noracle: {'equal' if checked else 'MISMATCH'}\n", args.out)
    else:
        doc = {"word": str(w), "terms": [dict(t.to_json(), coeff=str(c)) for t, c in result],
               "expr": expr.to_json(), "oracle_equal": checked,
               "policy": {"N": policy.N, "K": policy.K}}
        _emit(_dump(doc), args.out)
    return 0 if checked else EXIT_FAIL


def cmd_psi(args) -> int:
    lam = _parse_lambda(args.lam)
    signs = ("+", "-") if args.sign == "both" else (args.sign,)
    doc = {"lambda": list(lam), "order": args.order}
    for sign in signs:
        if args.method == "rational":
            vals = psi_rational(sign, lam, args.order)
        elif args.method == "exponential":
            vals = psi_exponential(sign, lam, args.order)
        else:
            vals = psi_coeffs(sign, lam, args.order)
        doc[f"psi{sign}"] = [str(v) for v in vals]
    if args.format == "text":
        lines = [f"psi{s}_{n} = {v}" for s in signs for n, v in enumerate(doc[f"psi{s}"])]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_dump(doc), args.out)
    return 0


def cmd_coeffs(args) -> int:
    lam = _parse_lambda(args.lam)
    doc = {"lambda": list(lam), "d_lambda": str(cb.d_lambda(lam)),
           "c": [{"box": list(x), "c": str(cb.c_coeff(lam, x))} for x in cb.addable_boxes(lam)]}
    cstar = []
    for x in cb.removable_boxes(lam):
        entry = {"box": list(x), "product": str(cb.cstar_product_form(lam, x)),
                 "lambda_form": str(cb.cstar_lambda_form(lam, x))}
        try:
            entry["c_star"] = str(cb.cstar_coeff(lam, x))
        except cb.ConsistencyError as exc:
            entry["error"] = str(exc)
        cstar.append(entry)
    doc["c_star"] = cstar
    if args.format == "text":
        lines = [f"d_lambda = {doc['d_lambda']}"]
        lines += [f"c({e['box']}) = {e['c']}" for e in doc["c"]]
        lines += [f"c*({e['box']}) = {e.get('c_star', e['product'])}" for e in cstar]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_dump(doc), args.out)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hallpath", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        sp.add_argument("--degree-cap", "-N", type=int, default=6, help="max total boxes (default 6)")
        sp.add_argument("--level-cap", "-K", type=int, default=3, help="max |level| (default 3)")
        sp.add_argument("--out", "-o", help="write output here instead of stdout")
        if fmt:
            sp.add_argument("--format", choices=("json", "text"), default="json")

    sp = sub.add_parser("act", help="apply a word to a basis state")
    sp.add_argument("word", help='surface syntax, e.g. "1_0 d- z1^2 d+ 1_0"')
    sp.add_argument("--state", help="state JSON (or @file): {side, lambda, w}")
    sp.add_argument("--lambda", dest="lam", help="level-0 state I_lambda, e.g. 2,1")
    common(sp)
    sp.set_defaults(func=cmd_act)

    sp = sub.add_parser("verify", help="run the relation suite")
    sp.add_argument("--relations", default="all", help="comma-separated ids, prefixes or groups")
    sp.add_argument("--series-order", "-M", type=int, default=6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--params", help="fast mode at a fixed point, q=<rat>,t=<rat>")
    sp.add_argument("--fast", action="store_true", help="fast mode at seeded random points")
    sp.add_argument("--workers", type=int, default=None,
                    help="worker processes (default: HALLPATH_THREADS or CPU count)")
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("matrix", help="matrix of an operator as (row, col, coeff) triplets")
    sp.add_argument("operator", help='a word such as "e[0]", "Delta[1]", or "psi+[1]"')
    sp.add_argument("--level", type=int, default=0, help="source level of the operator")
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_matrix)

    sp = sub.add_parser("rewrite", help="special-form rewriting of a positive-half word")
    sp.add_argument("word")
    common(sp)
    sp.set_defaults(func=cmd_rewrite)

    sp = sub.add_parser("psi", help="psi+- eigenvalues on I_lambda")
    sp.add_argument("--lambda", dest="lam", default="")
    sp.add_argument("--sign", choices=("+", "-", "both"), default="both")
    sp.add_argument("--order", type=int, default=6)
    sp.add_argument("--method", choices=("checked", "rational", "exponential"), default="checked")
    common(sp)
    sp.set_defaults(func=cmd_psi)

    sp = sub.add_parser("coeffs", help="c, c* and d_lambda for one partition")
    sp.add_argument("--lambda", dest="lam", default="")
    common(sp)
    sp.set_defaults(func=cmd_coeffs)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, LevelError, InvalidState, ScopeError, CliError, ValueError,
            cb.ConsistencyError, PoleError, TruncationOverflow) as exc:
        print(f"hallpath {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
