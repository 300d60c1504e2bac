"""Command line interface: ``abcmin <command> ...`` or ``python -m abcmin``.

Exit codes: 0 success, 1 usage or input error, 2 a verification failed,
3 a cap or resource limit was hit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import gfuncs, search, transforms
from .errors import ABCMinError, CapExceeded
from .generators import (
    DEFAULT_CAP,
    KragujevacSpec,
    enumerate_free_trees,
    make_branch,
    make_kragujevac,
)
from .greedy import build_greedy, greedy_is_optimal
from .tree import BranchKind, DegreeSequence, Tree, abc_index

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_RESOURCE = 0, 1, 2, 3
FORMATS = ("json", "csv", "human")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors raise instead of exiting with argparse's default status 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


# -- configuration -------------------------------------------------------------


@dataclass
class RunConfig:
    cap: int = DEFAULT_CAP
    jobs: int = 1
    cache: str = None
    root_tol: float = gfuncs.ROOT_TOL
    eq_tol: float = transforms.REL_TOL
    match_tol: float = 1e-12
    format: str = None  # None: the command's own default

    def validate(self) -> "RunConfig":
        if self.cap < 1:
            raise UsageError("cap must be >= 1")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")
        if min(self.root_tol, self.eq_tol, self.match_tol) <= 0:
            raise UsageError("tolerances must be positive")
        if self.format is not None and self.format not in FORMATS:
            raise UsageError(f"format must be one of {', '.join(FORMATS)}")
        return self


_CONFIG_TYPES = {"cap": int, "jobs": int, "cache": str, "root_tol": float, "eq_tol": float,
                 "match_tol": float, "format": str}
_ENV = {"ABCM_JOBS": "jobs", "ABCM_CACHE": "cache", "ABCM_CAP": "cap"}


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment; an optional ``[section]`` header is ignored."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _CONFIG_TYPES:
            raise UsageError(f"{path}:{lineno}: cannot parse {raw!r}")
        value = value.strip().strip('"').strip("'")
        out[key] = _CONFIG_TYPES[key](value)
    return out


def resolve_config(args, environ=None) -> RunConfig:
    """Flags override the environment, which overrides the config file, which overrides defaults."""
    environ = os.environ if environ is None else environ
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for var, key in _ENV.items():
        if environ.get(var):
            try:
                values[key] = _CONFIG_TYPES[key](environ[var])
            except ValueError:
                raise UsageError(f"{var}={environ[var]!r} is not a valid {key}") from None
    for key in _CONFIG_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return RunConfig(**values).validate()


# -- output ----------------------------------------------------------------------


def fmt_float(x, human=False) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".6g" if human else ".17g")


def to_json(obj) -> str:
    """JSON with every float written to 17 significant digits."""
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    return json.dumps(str(obj))


def to_csv(rows: list, columns: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt_float(r[c]) if isinstance(r[c], (float, np.floating)) else r[c] for c in columns])
    return buf.getvalue()


def to_human(rows: list, columns: list) -> str:
    cells = [[fmt_float(r[c], True) if isinstance(r[c], (float, np.floating)) else str(r[c]) for c in columns]
             for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(line.rstrip() for line in lines) + "\n"


def emit(cfg: RunConfig, payload, rows=None, columns=None, out=None, default="json"):
    """Print ``payload`` as JSON, or ``rows`` as CSV or a table."""
    out = out or sys.stdout
    fmt = cfg.format or default
    if fmt == "json" or rows is None:
        if fmt == "human" and isinstance(payload, (float, np.floating)):
            out.write(fmt_float(payload, True) + "\n")
        else:
            out.write(to_json(payload) + "\n")
    elif fmt == "csv":
        out.write(to_csv(rows, columns))
    else:
        out.write(to_human(rows, columns))


def _read_tree(path) -> Tree:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    try:
        return Tree.from_json(text)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read tree from {path}: {exc}") from None


def _ints(text: str) -> list:
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _assignments(text: str) -> dict:
    """``dx=46,dxi=45`` -> dict of floats."""
    out = {}
    for item in filter(None, (text or "").replace(" ", "").split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected name=value, got {item!r}")
        out[key] = float(value)
    return out


def _grid(text: str) -> dict:
    """``dx=46;dy=46:10000`` or ``dy=4:300:0.5`` -> dict of scalars / arrays (stop inclusive)."""
    out = {}
    for item in filter(None, text.replace(" ", "").split(";")):
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected name=value or name=start:stop[:step], got {item!r}")
        parts = [float(p) for p in value.split(":")]
        if len(parts) == 1:
            out[key] = parts[0]
        elif len(parts) in (2, 3):
            step = parts[2] if len(parts) == 3 else 1.0
            out[key] = np.arange(parts[0], parts[1] + step / 2, step)
        else:
            raise UsageError(f"bad grid entry {item!r}")
    return out


# -- commands ------------------------------------------------------------------


def cmd_compute(args, cfg):
    t = _read_tree(args.input)
    emit(cfg, abc_index(t), [{"n": t.n, "abc": abc_index(t)}], ["n", "abc"])
    return EXIT_OK


def cmd_greedy(args, cfg):
    ds = DegreeSequence(_ints(args.degrees)).check()
    rt = build_greedy(ds)
    payload = {"degrees": list(ds.values), "abc": abc_index(rt.tree), "tree": rt.tree.to_dict()}
    status = EXIT_OK
    if args.check:
        res = greedy_is_optimal(ds, oracle_cap=args.oracle_cap)
        payload.update({"optimal": res.optimal, "best_abc": res.best_abc, "realizations": res.realizations})
        if not res.optimal:
            payload["witness"] = res.witness.to_dict()
            status = EXIT_VERIFY
    emit(cfg, payload, [{k: v for k, v in payload.items() if k not in ("tree", "witness", "degrees")}],
         [k for k in ("abc", "optimal", "best_abc", "realizations") if k in payload])
    return status


def cmd_gen(args, cfg):
    if args.what == "branch":
        rt = make_branch(BranchKind.parse(args.kind))
        emit(cfg, {"kind": args.kind, "root": rt.root, "tree": rt.tree.to_dict(), "abc": abc_index(rt.tree)})
    elif args.what == "kragujevac":
        spec = KragujevacSpec.parse(args.spec)
        rt = make_kragujevac(spec)
        emit(cfg, {"spec": str(spec), "order": spec.order, "root": rt.root, "abc": spec.abc(),
                   "tree": rt.tree.to_dict()})
    else:
        trees = enumerate_free_trees(args.order, cfg.cap)
        if args.count:
            count = sum(1 for _ in trees)
            emit(cfg, {"order": args.order, "count": count}, [{"order": args.order, "count": count}],
                 ["order", "count"])
        elif args.out and not args.out.endswith(".jsonl"):
            target = Path(args.out)
            target.mkdir(parents=True, exist_ok=True)
            for i, t in enumerate(trees):
                (target / f"tree_{args.order}_{i:06d}.json").write_text(t.to_json() + "\n", encoding="utf-8")
        else:
            lines = (t.to_json() + "\n" for t in trees)
            if args.out:
                with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                    fh.writelines(lines)
            else:
                sys.stdout.writelines(lines)
    return EXIT_OK


def cmd_transform(args, cfg):
    if args.host:
        builder = getattr(transforms, f"host_{args.name}")
        params = _ints(args.host)
        t, anchors = builder(*params)
    else:
        if not args.input:
            raise UsageError("transform needs --input or --host")
        t = _read_tree(args.input)
        anchors = {}
    for key in transforms.ANCHORS[args.name]:
        value = getattr(args, key, None)
        if value is not None:
            anchors[key] = value
    r = transforms.apply_transform(args.name, t, **anchors)
    ok = transforms.audit_transform(r)
    payload = r.to_dict()
    payload["audit"] = ok
    emit(cfg, payload, [{"name": args.name, "delta_exact": r.delta_exact,
                         "delta_closed_form": r.delta_closed_form, "relation": r.relation,
                         "matched": r.matched, "audit": ok}],
         ["name", "delta_exact", "delta_closed_form", "relation", "matched", "audit"])
    return EXIT_OK if ok else EXIT_VERIFY


def _report_payload(r: gfuncs.SignReport) -> dict:
    return {
        "function": r.function, "grid": r.grid, "expect": r.expect, "certified": r.certified,
        "points": r.n_points, "violations": r.n_violations, "max": r.max_value, "min": r.min_value,
        "limit_ok": r.limit_ok, "first_violations": [dict(p, value=v) for p, v in r.violations[:10]],
        "limits": [dict(p, limit=v) for p, v in r.limits[:50]],
        "failing": r.failing,
    }


def cmd_gfunc(args, cfg):
    op = args.op
    if op == "list":
        rows = [{"name": g.name, "params": " ".join(g.params), "limits": " ".join(g.limits), "label": g.label}
                for g in gfuncs.REGISTRY.values()]
        emit(cfg, rows, rows, ["name", "params", "limits", "label"])
        return EXIT_OK
    if op == "eval":
        v = gfuncs.eval_g(args.name, _floats(args.params))
        emit(cfg, v, [{"name": args.name, "value": v}], ["name", "value"])
        return EXIT_OK
    if op == "roots":
        g = gfuncs.get(args.name)
        axis = args.axis or g.params[0]
        lo, hi = _floats(args.bracket)
        roots = gfuncs.find_roots(g, axis, _assignments(args.fixed), (lo, hi), tol=cfg.root_tol)
        rows = [{"lo": r.lo, "hi": r.hi, "root": r.mid} for r in roots]
        emit(cfg, {"name": g.name, "axis": axis, "roots": rows}, rows, ["lo", "hi", "root"])
        return EXIT_OK
    if op == "limit":
        v = gfuncs.limit_at_infinity(args.name, args.axis, _assignments(args.fixed))
        emit(cfg, v, [{"name": args.name, "axis": args.axis, "limit": v}], ["name", "axis", "limit"])
        return EXIT_OK
    if op == "sign":
        r = gfuncs.certify_sign(args.name, _grid(args.grid), args.expect, limit_axis=args.limit_axis)
    elif op == "monotonicity":
        r = gfuncs.monotonicity_check(args.pred)
    elif op == "envelope":
        if args.a or args.b:
            return _envelope_pair(args, cfg)
        if not args.case:
            raise UsageError("envelope needs --case, or --a and --b")
        r = gfuncs.case1_envelope() if args.case == "case1" else gfuncs.subcase21_envelope()
    elif op in ("table1", "table2"):
        rows = gfuncs.table1() if op == "table1" else gfuncs.table2()
        col = "k" if op == "table1" else "c"
        published = dict(gfuncs.TABLE1_PUBLISHED if op == "table1" else gfuncs.TABLE2_PUBLISHED)
        recs = [{"dx": dx, col: v, "published": published.get(dx), "match": v == published.get(dx)}
                for dx, v in rows]
        emit(cfg, recs, recs, ["dx", col, "published", "match"], default="csv")
        return EXIT_OK if all(r["match"] for r in recs) else EXIT_VERIFY
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(op)
    payload = _report_payload(r)
    emit(cfg, payload, [{k: payload[k] for k in ("function", "certified", "points", "violations", "max")}],
         ["function", "certified", "points", "violations", "max"])
    return EXIT_OK if r.certified else EXIT_VERIFY


def _fixings(text: str, axis: str) -> dict:
    """``dx=48,dxi=47,k=dz-2``: numbers, or the sweep axis minus an integer offset."""
    out = {}
    for item in filter(None, (text or "").replace(" ", "").split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"expected name=value, got {item!r}")
        if value == axis or value.startswith(axis + "-"):
            off = value[len(axis) + 1:] or "0"
            try:
                out[key] = gfuncs.offset(axis, int(off))
            except ValueError:
                raise UsageError(f"bad offset in {item!r}") from None
        else:
            try:
                out[key] = float(value)
            except ValueError:
                raise UsageError(f"bad value in {item!r}") from None
    return out


def _envelope_pair(args, cfg):
    """Pointwise min of two functions along one axis, as rows (axis, fa, fb, min)."""
    if not (args.a and args.b):
        raise UsageError("envelope needs both --a and --b")
    axis = args.axis
    fixed = _fixings(args.fix, axis)
    lo, hi = (_ints(args.range) if args.range else
              (int(max(4, *(v for v in fixed.values() if isinstance(v, float)))), gfuncs.DZ_MAX))
    xs = np.arange(lo, hi + 1, dtype=float)
    cols = {k: (v({axis: xs}) if callable(v) else v) for k, v in fixed.items()}
    fa, ma = gfuncs.evaluate(args.a, **{**cols, axis: xs})
    fb, mb = gfuncs.evaluate(args.b, **{**cols, axis: xs})
    valid = ma & mb
    env = np.minimum(fa, fb)
    rows = [{axis: int(x), "fa": float(a), "fb": float(b), "min": float(m)}
            for x, a, b, m, ok in zip(xs, fa, fb, env, valid) if ok]
    report = gfuncs.lower_envelope(args.a, args.b, axis, xs, [fixed])
    emit(cfg, {"a": args.a, "b": args.b, "axis": axis, "fixed": args.fix, "rows": rows,
               "certified": report.certified}, rows, [axis, "fa", "fb", "min"], default="csv")
    return EXIT_OK if report.certified else EXIT_VERIFY


def _branches(text):
    return {BranchKind.parse(x) for x in text.split(",") if x.strip()}


def cmd_search(args, cfg):
    if args.mode == "exhaustive":
        params = {"cap": cfg.cap, "jobs": cfg.jobs}
        r = search.cache_load(args.order, "exhaustive", params, cfg.cache) if cfg.cache else None
        if r is None:
            r = search.exhaustive_min(args.order, jobs=cfg.jobs, cap=cfg.cap)
            search.audit_structure(r)
            if cfg.cache:
                search.cache_store(r, cfg.cache)
        return _emit_search(cfg, r)
    if args.mode == "family":
        allowed = _branches(args.branches)
        if args.allow_p3:
            allowed |= {BranchKind(b.k, True) for b in allowed}
        r = search.family_min(args.order, allow_p3=args.allow_p3, allowed_branches=allowed,
                              max_hubs=args.max_hubs)
        search.audit_structure(r)
        return _emit_search(cfg, r)
    rows = search.conjecture_check(range(args.start, args.stop + 1), allowed_branches=_branches(args.branches),
                                   no_p3_hubs=args.no_p3_hubs)
    table = [row.as_row() for row in rows]
    columns = ["n", "no_p3_abc", "no_p3_spec", "p3_abc", "p3_spec", "gap", "winner"]
    if args.out:
        Path(args.out).write_text(to_csv(table, columns), encoding="utf-8", newline="\n")
    losers = [row["n"] for row in table if row["winner"] != "no-p3"]
    emit(cfg, {"from": args.start, "to": args.stop, "orders": len(table), "p3_wins": losers}, table, columns)
    return EXIT_OK if not losers else EXIT_VERIFY


def _emit_search(cfg, r):
    payload = r.to_dict()
    # wall-clock time would make identical runs differ
    payload.pop("elapsed", None)
    payload["ok"] = r.ok
    if not r.ok:
        payload["witnesses"] = [a.to_dict() for a in r.audits if a.enforced and not a.passed]
    emit(cfg, payload, [{"n": r.n, "scope": r.scope, "min_abc": r.min_abc, "minima": len(r.minima),
                         "ok": r.ok, "provenance": r.provenance}],
         ["n", "scope", "min_abc", "minima", "ok", "provenance"])
    return EXIT_OK if r.ok else EXIT_VERIFY


def cmd_reproduce(args, cfg):
    from .reproduce import run_all

    rows = run_all(quick=args.quick)
    table = [{"group": r.group, "check": r.name, "expected": r.expected, "observed": r.observed,
              "status": r.status} for r in rows]
    columns = ["group", "check", "expected", "observed", "status"]
    if (cfg.format or "json") == "json":
        emit(cfg, table)
    elif cfg.format == "human":
        for rec, r in zip(table, rows):
            rec["seconds"] = round(r.seconds, 2)
        emit(cfg, None, table, columns + ["seconds"])
    else:
        emit(cfg, None, table, columns)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_VERIFY


# -- parser ----------------------------------------------------------------------


def _add_globals(p, default):
    p.add_argument("--format", choices=FORMATS, default=default, help="output format (default json; csv for tables and envelope pairs)")
    p.add_argument("--config", default=default, help="key=value config file")
    p.add_argument("--cap", type=int, default=default, help="enumeration cap (max order)")
    p.add_argument("--jobs", type=int, default=default, help="worker processes")
    p.add_argument("--cache", default=default, help="cache directory for search results")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="abcmin", description="Minimal-ABC trees: compute, transform, certify, search.")
    _add_globals(p, None)
    # the same flags are accepted after the subcommand; SUPPRESS keeps them from resetting
    common = _Parser(add_help=False)
    _add_globals(common, argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", parents=[common], help="ABC index of a tree given as JSON")
    c.add_argument("--input", required=True, help="tree JSON file, or - for stdin")
    c.set_defaults(func=cmd_compute)

    g = sub.add_parser("greedy", parents=[common], help="greedy tree of a degree sequence")
    g.add_argument("--degrees", required=True, help="comma-separated degrees")
    g.add_argument("--check", action="store_true", help="compare with every realization")
    g.add_argument("--oracle-cap", type=int, default=10_000)
    g.set_defaults(func=cmd_greedy)

    gen = sub.add_parser("gen", help="generate branches, Kragujevac trees or all free trees")
    gsub = gen.add_subparsers(dest="what", required=True, parser_class=_Parser)
    b = gsub.add_parser("branch", parents=[common])
    b.add_argument("--kind", required=True, help="e.g. B3 or B3*")
    k = gsub.add_parser("kragujevac", parents=[common])
    k.add_argument("--spec", "--branches", dest="spec", required=True, help='e.g. "B3:58,B3*:1"')
    e = gsub.add_parser("enumerate", parents=[common])
    e.add_argument("--order", type=int, required=True)
    e.add_argument("--count", action="store_true", help="print only the number of trees")
    e.add_argument("--out", help="a .jsonl file, or a directory for one JSON file per tree")
    gen.set_defaults(func=cmd_gen)

    t = sub.add_parser("transform", parents=[common], help="apply T, T1..T6 and check the ABC change")
    t.add_argument("--name", required=True, choices=transforms.NAMES)
    t.add_argument("--input", help="host tree JSON")
    t.add_argument("--host", help="build a host from degrees instead, e.g. 62,63 for T3")
    for anchor in ("x", "y", "z", "w", "yp"):
        t.add_argument(f"--{anchor}", type=int)
    t.set_defaults(func=cmd_transform)

    f = sub.add_parser("gfunc", help="evaluate and certify the change functions")
    fsub = f.add_subparsers(dest="op", required=True, parser_class=_Parser)
    fsub.add_parser("list", parents=[common])
    ev = fsub.add_parser("eval", parents=[common])
    ev.add_argument("--name", required=True)
    ev.add_argument("--params", required=True, help="comma-separated, in declared order")
    ro = fsub.add_parser("roots", parents=[common])
    ro.add_argument("--name", required=True)
    ro.add_argument("--axis")
    ro.add_argument("--bracket", required=True, help="lo,hi")
    ro.add_argument("--fixed", default="", help="name=value,...")
    li = fsub.add_parser("limit", parents=[common])
    li.add_argument("--name", required=True)
    li.add_argument("--axis", required=True)
    li.add_argument("--fixed", default="")
    si = fsub.add_parser("sign", parents=[common])
    si.add_argument("--name", required=True)
    si.add_argument("--grid", required=True, help="e.g. 'dx=46;dy=46:10000'")
    si.add_argument("--expect", default="negative",
                    choices=("negative", "positive", "nonpositive", "nonnegative"))
    si.add_argument("--limit-axis")
    fsub.add_parser("table1", parents=[common])
    fsub.add_parser("table2", parents=[common])
    en = fsub.add_parser("envelope", parents=[common])
    en.add_argument("--case", choices=("case1", "subcase21"), help="a published envelope family")
    en.add_argument("--a", help="first function of a custom pair")
    en.add_argument("--b", help="second function of a custom pair")
    en.add_argument("--fix", help="fixed parameters, e.g. dx=48,dxi=47,k=dz-2")
    en.add_argument("--axis", default="dz", help="sweep axis (default dz)")
    en.add_argument("--range", help="lo,hi of the sweep (default max(4, fixed values)..10000)")
    mo = fsub.add_parser("monotonicity", parents=[common])
    mo.add_argument("--pred", required=True, choices=sorted(gfuncs.MONOTONICITY_CLAIMS))
    f.set_defaults(func=cmd_gfunc)

    s = sub.add_parser("search", help="exhaustive and family searches")
    ssub = s.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    ex = ssub.add_parser("exhaustive", parents=[common])
    ex.add_argument("--order", type=int, required=True)
    fa = ssub.add_parser("family", parents=[common])
    fa.add_argument("--order", type=int, required=True)
    fa.add_argument("--branches", default="B2,B3")
    fa.add_argument("--allow-p3", action="store_true")
    fa.add_argument("--max-hubs", type=int, default=1, choices=(1, 2))
    co = ssub.add_parser("conjecture", parents=[common])
    co.add_argument("--from", dest="start", type=int, required=True)
    co.add_argument("--to", dest="stop", type=int, required=True)
    co.add_argument("--branches", default="B2,B3,B2*,B3*")
    co.add_argument("--no-p3-hubs", type=int, default=1, choices=(1, 2))
    co.add_argument("--out", help="write the table as CSV")
    s.set_defaults(func=cmd_search)

    r = sub.add_parser("reproduce", parents=[common], help="run the reproduction suite")
    r.add_argument("target", choices=("all",))
    r.add_argument("--quick", action="store_true", help="smaller greedy and audit ranges")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"abcmin: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except MemoryError:
        print("abcmin: out of memory", file=sys.stderr)
        return EXIT_RESOURCE
    except BrokenPipeError:
        # the reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except (ABCMinError, KeyError, FileNotFoundError) as exc:
        print(f"abcmin: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
