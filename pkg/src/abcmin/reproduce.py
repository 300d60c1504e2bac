"""The reproduction suite: published constants, tables, certificates and searches.

Each check yields a :class:`CheckRow`; :func:`run_all` returns the full
matrix. The last row asserts that every registered g-function and every
transformation was exercised.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass

from . import gfuncs, search, transforms
from .greedy import greedy_is_optimal
from .tree import DegreeSequence


@dataclass
class CheckRow:
    group: str
    name: str
    expected: str
    observed: str
    passed: bool
    seconds: float = 0.0

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


def _timed(group, name, expected, fn):
    start = time.perf_counter()
    observed, passed = fn()
    return CheckRow(group, name, expected, observed, bool(passed), time.perf_counter() - start)


def _single_root(name, bracket, target, tol):
    roots = gfuncs.find_roots(name, {"g2_prop": "dy"}.get(name, "dz"), {}, bracket)
    mids = [r.mid for r in roots]
    ok = len(mids) == 1 and abs(mids[0] - target) <= tol
    return ", ".join(f"{m:.10g}" for m in mids) or "none", ok


def constant_checks() -> list:
    rows = [
        _timed("constants", "g2_prop root", "4.04954 +- 1e-4",
               lambda: _single_root("g2_prop", (4, 100), 4.04954, 1e-4)),
        _timed("constants", "g6_even root", "59.5903 +- 1e-3",
               lambda: _single_root("g6_even", (4, 200), 59.5903, 1e-3)),
        _timed("constants", "g6_odd root", "59.6067 +- 1e-3",
               lambda: _single_root("g6_odd", (4, 200), 59.6067, 1e-3)),
    ]

    def g3():
        v = gfuncs.eval_g("g3", (62, 63))
        return f"{v:.10g}", abs(v - (-0.0000277276)) <= 1e-9

    def g5():
        v = gfuncs.eval_g("g5", (62, 63))
        return f"{v:.3g}", abs(v) <= 1e-9

    def asym():
        v = gfuncs.limit_at_infinity("g1o", "dy", {"dx": 5})
        return f"{v:.8g}", abs(v - 0.215937) <= 1e-5

    def first_neg():
        v = gfuncs.first_negative_limit("g1o")
        return str(v), v == 54

    def largest_g2():
        v = gfuncs.largest_negative_g2_case1()
        return str(v), v == 45

    rows += [
        _timed("constants", "g3(62, 63)", "-0.0000277276 +- 1e-9", g3),
        _timed("constants", "g5(62, 63)", "0 +- 1e-9", g5),
        _timed("constants", "g1o(5, dy) asymptote", "0.215937 +- 1e-5", asym),
        _timed("constants", "first d(x) with lim g1o < 0", "54", first_neg),
        _timed("constants", "largest d(x) with g2_case1 < 0", "45", largest_g2),
    ]
    return rows


def table_checks() -> list:
    def t1():
        got = gfuncs.table1()
        ok = sorted(got) == sorted(gfuncs.TABLE1_PUBLISHED)
        return " ".join(f"{a}:{b}" for a, b in got), ok

    def t2():
        got = gfuncs.table2()
        return " ".join(f"{a}:{b}" for a, b in got), got == gfuncs.TABLE2_PUBLISHED

    def threshold66():
        k = dict(gfuncs.table1(dx_values=[66]))[66]
        return f"k={k}", k == 1

    return [
        _timed("tables", "table1", "13 published pairs", t1),
        _timed("tables", "table2", "6 published pairs", t2),
        _timed("tables", "d(x) = 66 needs no restriction on k", "k=1", threshold66),
    ]


def certificate_checks() -> list:
    rows = []
    for pred in gfuncs.MONOTONICITY_CLAIMS:
        def mono(pred=pred):
            r = gfuncs.monotonicity_check(pred)
            return f"{r.n_violations} violations / {r.n_points}", r.certified
        rows.append(_timed("certificates", f"monotonicity {pred}", "0 violations", mono))

    def case1():
        r = gfuncs.case1_envelope()
        bad = sorted({int(c["dx"]) for c in r.failing})
        return f"{r.n_violations} violations (d(x) {bad}), limits ok={r.limit_ok}", r.certified

    def sub21():
        r = gfuncs.subcase21_envelope()
        return f"{r.n_violations} violations / {r.n_points}, limits ok={r.limit_ok}", r.certified

    rows.append(_timed("certificates", "envelope case 1, d(x) 46..53", "negative", case1))
    rows.append(_timed("certificates", "envelope subcase 2.1", "negative", sub21))
    return rows


def search_checks(greedy_max_len: int = 8, audit_max_n: int = 12) -> list:
    def literal():
        rows = search.conjecture_check(range(416, 1201))
        bad = [r.n for r in rows if not r.no_p3_wins]
        return f"{len(bad)} orders where P3 wins, first {bad[:3]}", not bad

    def extended():
        rows = search.conjecture_check(range(416, 1201), no_p3_hubs=2)
        bad = [r.n for r in rows if not r.no_p3_wins]
        return f"{len(bad)} orders where P3 wins", not bad

    def b2():
        got = {n: search.b2_in_family_min(n) for n in (161, 168)}
        return str(got), all(got.values())

    def greedy():
        seqs = list(degree_sequences(greedy_max_len))
        bad = [s for s in seqs if not greedy_is_optimal(s).optimal]
        return f"{len(seqs)} sequences, {len(bad)} failures", not bad

    def audits():
        bad = []
        for n in range(1, audit_max_n + 1):
            r = search.exhaustive_min(n)
            search.audit_structure(r)
            if not r.ok:
                bad.append(n)
        return f"failing orders {bad}", not bad

    return [
        _timed("search", "no-P3 family wins on [416, 1200] (one hub)", "all orders", literal),
        _timed("search", "no-P3 family wins on [416, 1200] (up to two hubs)", "all orders", extended),
        _timed("search", "B2 in family minimum at 161, 168", "both", b2),
        _timed("search", f"greedy optimal, sequences of length <= {greedy_max_len}", "all", greedy),
        _timed("search", f"structural audits, n <= {audit_max_n}", "all pass", audits),
    ]


SAMPLES = {
    "g1_prop": (6, 2, 5), "g2_prop": (10,), "g1o": (55, 60), "g1e": (56, 60), "g1_parity": (54, 60),
    "g2_case1": (45, 50), "g12": (60, 70, 59, 5), "g22": (50, 70, 50, 3), "g3": (62, 63),
    "g41": (63, 69), "g42": (63, 149), "g5": (32, 63), "g6": (60,), "g6_even": (60,), "g6_odd": (61,),
    "appendix_g030": (5, 6, 1, 1), "appendix_g030_2": (5, 6, 1, 1), "appendix_g040": (10,),
    "appendix_g050": (10, 2),
}

HOSTS = {
    "T": lambda: transforms.host_T(6, 7, 5),
    "T1": lambda: transforms.host_T1(9, 6, [9, 9, 10, 11], 5),
    "T2": lambda: transforms.host_T2(4, 6, [5, 5]),
    "T3": lambda: transforms.host_T3(62, 63),
    "T4": lambda: transforms.host_T4(63, 69),
    "T5": lambda: transforms.host_T5(62, 63),
    "T6": lambda: transforms.host_T6(60),
}


def transform_checks(instances: int = 20, seed: int = 7) -> list:
    rows = []
    rng = random.Random(seed)
    for name in transforms.NAMES:
        def run(name=name):
            t, anchors = HOSTS[name]()
            recs = [transforms.apply_transform(name, t, **anchors)]
            for _ in range(instances):
                t, anchors = transforms.random_instance(name, rng)
                recs.append(transforms.apply_transform(name, t, **anchors))
            bad = sum(not transforms.audit_transform(r) for r in recs)
            return f"{len(recs)} applications, {bad} failed audits", not bad
        rows.append(_timed("transforms", f"{name} audit", "all pass", run))
    return rows


def coverage_check() -> CheckRow:
    def run():
        touched = set()
        for name, args in SAMPLES.items():
            v = gfuncs.eval_g(name, args)
            if math.isfinite(v):
                touched.add(name)
        missing_g = sorted(set(gfuncs.REGISTRY) - touched)
        missing_t = sorted(set(transforms.NAMES) - set(HOSTS))
        return f"missing g: {missing_g}, missing transforms: {missing_t}", not missing_g and not missing_t
    return _timed("coverage", "every g-function and transformation exercised", "none missing", run)


def degree_sequences(max_len: int):
    """Every tree-realizable degree sequence with 2..max_len entries."""
    for n in range(2, max_len + 1):
        for values in _partitions(2 * (n - 1), n, n - 1):
            yield DegreeSequence(values)


def _partitions(total, parts, largest):
    """Non-increasing sequences of ``parts`` positive integers <= ``largest`` summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(min(largest, total - (parts - 1)), 0, -1):
        if first * parts < total:
            break
        for rest in _partitions(total - first, parts - 1, first):
            yield (first, *rest)


def run_all(quick: bool = False) -> list:
    rows = constant_checks() + table_checks() + certificate_checks()
    rows += transform_checks()
    rows += search_checks(greedy_max_len=7 if quick else 8, audit_max_n=10 if quick else 12)
    rows.append(coverage_check())
    return rows
