"""Minimal-ABC search: exhaustive at small order, Kragujevac families at large order.

The exhaustive scan walks every free tree of a given order, optionally split
over a process pool, and keeps all classes attaining the minimum. The family
search evaluates trees built from a central vertex (or two adjacent hubs)
carrying B_k / B_k* branches by their closed-form index, so orders in the
thousands are cheap. Found minima can be audited against the known
structural properties of minimal trees.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CapExceeded, NoComposition
from .generators import (
    DEFAULT_CAP,
    KragujevacSpec,
    SplitKragujevacSpec,
    TreeStream,
    make_kragujevac,
    make_split_kragujevac,
)
from .greedy import build_greedy
from .tree import (
    SQRT_HALF,
    BranchKind,
    Tree,
    abc_index,
    branch_kind_at,
    canonical_code,
    count_p3,
    internal_paths,
    pendent_paths,
)

TIE_TOL = 1e-12
DEFAULT_BRANCHES = frozenset(BranchKind.parse(s) for s in ("B2", "B3", "B2*", "B3*"))
MAX_SPLITS = 20_000_000


@dataclass
class AuditResult:
    name: str
    passed: bool
    enforced: bool = True
    witnesses: list = field(default_factory=list)
    exceptions: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "enforced": self.enforced,
                "witnesses": self.witnesses, "exceptions": self.exceptions}


@dataclass
class SearchReport:
    n: int
    scope: str  # "exhaustive" or "kragujevac-family"
    minima: list  # Tree objects, or family specs
    min_abc: float
    audits: list = field(default_factory=list)
    elapsed: float = 0.0
    provenance: str = "computed"
    scanned: int = 0
    params: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(a.passed or not a.enforced for a in self.audits)

    def trees(self) -> list:
        return [m if isinstance(m, Tree) else spec_tree(m) for m in self.minima]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "scope": self.scope,
            "min_abc": self.min_abc,
            "minima": [m.to_dict() if isinstance(m, Tree) else str(m) for m in self.minima],
            "audits": [a.to_dict() for a in self.audits],
            "elapsed": self.elapsed,
            "provenance": self.provenance,
            "scanned": self.scanned,
            "params": self.params,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SearchReport":
        minima = [Tree.from_dict(m) if isinstance(m, dict) else parse_family_spec(m) for m in data["minima"]]
        audits = [AuditResult(**a) for a in data.get("audits", [])]
        return cls(data["n"], data["scope"], minima, data["min_abc"], audits, data.get("elapsed", 0.0),
                   data.get("provenance", "computed"), data.get("scanned", 0), data.get("params", {}))


@dataclass(frozen=True)
class FamilyPoint:
    n: int
    spec: object  # KragujevacSpec or SplitKragujevacSpec
    abc: float

    def __post_init__(self):
        if self.spec.order != self.n:
            raise ValueError(f"spec {self.spec} has order {self.spec.order}, not {self.n}")


def spec_tree(spec) -> Tree:
    if isinstance(spec, SplitKragujevacSpec):
        return make_split_kragujevac(spec).tree
    return make_kragujevac(spec).tree


def parse_family_spec(text: str):
    """Inverse of ``str`` for one-hub and two-hub family specs."""
    m = re.fullmatch(r"\[(.*)\]-\[(.*)\]", text.strip())
    if m:
        return SplitKragujevacSpec(KragujevacSpec.parse(m.group(1)), KragujevacSpec.parse(m.group(2)))
    return KragujevacSpec.parse(text)


# -- exhaustive ---------------------------------------------------------------


def _scan(stream: TreeStream):
    best = math.inf
    keep = []
    count = 0
    for t in stream:
        count += 1
        a = abc_index(t)
        if a < best - TIE_TOL:
            best, keep = a, [t]
        elif a <= best + TIE_TOL:
            keep.append(t)
    return best, [t.to_dict() for t in keep], count


def exhaustive_min(n: int, jobs: int = 1, cap: int = DEFAULT_CAP) -> SearchReport:
    """All minimal-ABC trees of order ``n``, one per isomorphism class."""
    start = time.perf_counter()
    stream = TreeStream(n, cap)
    parts = stream.partitions(max(1, jobs))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan, parts))
    else:
        results = [_scan(p) for p in parts]
    best = min(r[0] for r in results)
    minima = {}
    for value, trees, _ in results:
        if value <= best + TIE_TOL:
            for d in trees:
                t = Tree.from_dict(d)
                minima.setdefault(canonical_code(t), t)
    ordered = [minima[c] for c in sorted(minima)]
    best = min(abc_index(t) for t in ordered)
    return SearchReport(n, "exhaustive", ordered, best, elapsed=time.perf_counter() - start,
                        scanned=sum(r[2] for r in results), params={"cap": cap, "jobs": jobs})


# -- Kragujevac families ---------------------------------------------------------


def _vectors(total: int, orders: list) -> np.ndarray:
    """All non-negative integer vectors m with sum(m * orders) == total."""
    k = len(orders)
    if total < 0:
        return np.zeros((0, k), dtype=np.int64)
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64) if total == 0 else np.zeros((0, 0), dtype=np.int64)
    if k == 1:
        if total % orders[0]:
            return np.zeros((0, 1), dtype=np.int64)
        return np.array([[total // orders[0]]], dtype=np.int64)
    if k == 2:
        a = np.arange(total // orders[0] + 1, dtype=np.int64)
        rest = total - a * orders[0]
        ok = rest % orders[1] == 0
        return np.stack([a[ok], rest[ok] // orders[1]], axis=1)
    blocks = []
    for m0 in range(total // orders[0] + 1):
        sub = _vectors(total - m0 * orders[0], orders[1:])
        if len(sub):
            blocks.append(np.hstack([np.full((len(sub), 1), m0, dtype=np.int64), sub]))
    return np.vstack(blocks) if blocks else np.zeros((0, k), dtype=np.int64)


def _fv(a, b):
    return np.sqrt((a + b - 2.0) / (a * b))


def _columns(allowed, star):
    plain = sorted(b for b in allowed if not b.star)
    stars = sorted(b for b in allowed if b.star) if star else []
    return plain, stars


def _candidate_blocks(n: int, hubs: int, plain: list, star_kind=None):
    """Composition matrices for one placement choice; yields (columns, matrix)."""
    cols = plain + ([star_kind] if star_kind is not None else [])
    orders = [b.order for b in plain]
    base = n - hubs - (star_kind.order if star_kind is not None else 0)
    mats = _vectors(base, orders) if orders else (
        np.zeros((1, 0), dtype=np.int64) if base == 0 else np.zeros((0, 0), dtype=np.int64))
    if star_kind is not None:
        mats = np.hstack([mats, np.ones((len(mats), 1), dtype=np.int64)])
    return cols, mats


def _one_hub_values(n, cols, mats):
    ks = np.array([b.k for b in cols], dtype=float)
    c = mats.sum(axis=1).astype(float)
    keep = c >= 1
    mats, c = mats[keep], c[keep]
    cost = (mats * _fv(c[:, None], ks[None, :] + 1)).sum(axis=1)
    return mats, cost + (n - 1 - c) * SQRT_HALF


def _two_hub_values(n, cols, mats):
    ks = np.array([b.k for b in cols], dtype=float)
    total = int(sum(int(np.prod(m + 1)) for m in mats))
    if total > MAX_SPLITS:
        raise CapExceeded(f"two-hub family at n={n} has {total} splits (limit {MAX_SPLITS})")
    lefts, rights = [], []
    for m in mats:
        grid = np.indices(tuple(m + 1)).reshape(len(m), -1).T
        lefts.append(grid)
        rights.append(m[None, :] - grid)
    if not lefts:
        return np.zeros((0, 2, len(cols)), dtype=np.int64), np.zeros(0)
    L, R = np.vstack(lefts), np.vstack(rights)
    cl, cr = L.sum(axis=1), R.sum(axis=1)
    keep = (cl >= 1) & (cr >= 1)
    L, R, cl, cr = L[keep], R[keep], cl[keep].astype(float), cr[keep].astype(float)
    ca, cb = cl + 1, cr + 1
    cost = ((L * _fv(ca[:, None], ks[None, :] + 1)).sum(axis=1)
            + (R * _fv(cb[:, None], ks[None, :] + 1)).sum(axis=1)
            + _fv(ca, cb) + (n - 2 - cl - cr) * SQRT_HALF)
    return np.stack([L, R], axis=1), cost


def _spec_from(cols, row):
    return KragujevacSpec([b for b, m in zip(cols, row) for _ in range(int(m))])


def family_candidates(n: int, allow_p3: bool = False, allowed_branches=None, max_hubs: int = 1,
                      require_p3: bool = False, slack: float = 1e-9) -> list:
    """Family points of order ``n`` within ``slack`` of the family minimum (exact values)."""
    allowed = DEFAULT_BRANCHES if allowed_branches is None else frozenset(allowed_branches)
    plain, stars = _columns(allowed, allow_p3 or require_p3)
    placements = [] if require_p3 else [None]
    placements += stars
    found = []
    for hubs in range(1, max_hubs + 1):
        for star in placements:
            cols, mats = _candidate_blocks(n, hubs, plain, star)
            if not len(mats):
                continue
            if hubs == 1:
                rows, vals = _one_hub_values(n, cols, mats)
            else:
                rows, vals = _two_hub_values(n, cols, mats)
            if len(vals):
                found.append((cols, rows, vals, hubs))
    if not found:
        raise NoComposition(f"no composition of order {n} over {sorted(map(str, allowed))}"
                            f" (p3={'required' if require_p3 else allow_p3}, hubs<={max_hubs})")
    best = min(float(v.min()) for _, _, v, _ in found)
    points = {}
    for cols, rows, vals, hubs in found:
        for i in np.flatnonzero(vals <= best + slack):
            if hubs == 1:
                spec = _spec_from(cols, rows[i])
            else:
                left, right = _spec_from(cols, rows[i][0]), _spec_from(cols, rows[i][1])
                if str(left) > str(right):
                    left, right = right, left
                spec = SplitKragujevacSpec(left, right)
            points.setdefault(str(spec), FamilyPoint(n, spec, spec.abc()))
    return sorted(points.values(), key=lambda p: (p.abc, str(p.spec)))


def family_min(n: int, allow_p3: bool = False, allowed_branches=None, max_hubs: int = 1,
               require_p3: bool = False) -> SearchReport:
    """Minimum of the Kragujevac family of order ``n``.

    ``allow_p3`` admits compositions with at most one starred branch;
    ``require_p3`` restricts to exactly one. ``max_hubs = 2`` adds trees with
    two adjacent hubs.
    """
    start = time.perf_counter()
    pts = family_candidates(n, allow_p3, allowed_branches, max_hubs, require_p3)
    best = pts[0].abc
    minima = [p.spec for p in pts if p.abc <= best + TIE_TOL]
    allowed = DEFAULT_BRANCHES if allowed_branches is None else allowed_branches
    return SearchReport(n, "kragujevac-family", minima, best, elapsed=time.perf_counter() - start,
                        scanned=len(pts),
                        params={"allow_p3": allow_p3, "require_p3": require_p3, "max_hubs": max_hubs,
                                "branches": sorted(map(str, allowed))})


# -- structural audits ----------------------------------------------------------


def _branches(t: Tree):
    """(parent, root, kind) for every subtree that is a B_k / B_k* branch with root degree >= 3."""
    out = []
    for v in range(t.n):
        if t.degrees[v] < 3:
            continue
        for p in t.neighbors(v):
            kind = branch_kind_at(t, p, v)
            if kind is not None:
                out.append((p, v, kind))
    return out


def audit_tree(t: Tree, n: int = None, scope: str = "exhaustive") -> list:
    n = t.n if n is None else n
    out = []
    paths = pendent_paths(t)
    trivial = any(p.whole_tree for p in paths)
    long_paths = [list(p.vertices) for p in paths if not p.whole_tree and p.length > 3]
    short_paths = [list(p.vertices) for p in paths if not p.whole_tree and p.length < 2]
    out.append(AuditResult("pendent-paths-at-most-3", not long_paths, True, long_paths))
    out.append(AuditResult("pendent-paths-at-least-2", not short_paths, not trivial, short_paths))
    p3 = count_p3(t)
    out.append(AuditResult("at-most-one-p3", p3 <= 1, True, [{"p3": p3}] if p3 > 1 else []))
    inner = internal_paths(t)
    long_inner = [list(p.vertices) for p in inner if p.length >= 2]
    unit = [list(p.vertices) for p in inner if p.length == 1]
    out.append(AuditResult("no-internal-paths", not long_inner, True, long_inner, unit))
    branches = _branches(t)
    big_star = [{"root": v, "kind": str(k)} for _, v, k in branches if k.star and k.k >= 4]
    out.append(AuditResult("no-bk-star-k4", not big_star, True, big_star))
    has_b2 = [{"root": v, "kind": str(k)} for _, v, k in branches if k.k == 2]
    guard = n > 18 and p3 >= 1
    out.append(AuditResult("b2-only-at-161-168", not has_b2 or n in (161, 168), guard,
                           has_b2 if n not in (161, 168) else []))
    a = abc_index(t)
    g = abc_index(build_greedy(t.degree_sequence()).tree)
    out.append(AuditResult("greedy-matches", abs(g - a) <= TIE_TOL, scope == "exhaustive",
                           [] if abs(g - a) <= TIE_TOL else [{"tree": a, "greedy": g}]))
    return out


def audit_structure(r: SearchReport) -> list:
    """Audit every minimum of ``r``; results are merged per property and stored on ``r``."""
    merged = {}
    for t in r.trees():
        for a in audit_tree(t, r.n, r.scope):
            m = merged.setdefault(a.name, AuditResult(a.name, True, a.enforced))
            m.passed = m.passed and a.passed
            m.enforced = m.enforced or a.enforced
            m.witnesses += a.witnesses
            m.exceptions += a.exceptions
    r.audits = list(merged.values())
    return r.audits


# -- conjecture shadow ------------------------------------------------------------


@dataclass
class ConjectureRow:
    n: int
    no_p3: FamilyPoint
    with_p3: FamilyPoint

    @property
    def gap(self) -> float:
        if self.no_p3 is None or self.with_p3 is None:
            return math.nan
        return self.no_p3.abc - self.with_p3.abc

    @property
    def no_p3_wins(self) -> bool:
        if self.with_p3 is None:
            return True
        if self.no_p3 is None:
            return False
        return self.no_p3.abc <= self.with_p3.abc + TIE_TOL

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "no_p3_abc": self.no_p3.abc if self.no_p3 else math.nan,
            "no_p3_spec": str(self.no_p3.spec) if self.no_p3 else "",
            "p3_abc": self.with_p3.abc if self.with_p3 else math.nan,
            "p3_spec": str(self.with_p3.spec) if self.with_p3 else "",
            "gap": self.gap,
            "winner": "no-p3" if self.no_p3_wins else "p3",
        }


def _best_point(n, **kw):
    try:
        return family_candidates(n, **kw)[0]
    except NoComposition:
        return None


def conjecture_check(n_values, allowed_branches=None, no_p3_hubs: int = 1, p3_hubs: int = 1) -> list:
    """Best tree without a length-3 pendent path versus best with one, per order.

    The no-P3 family may use up to ``no_p3_hubs`` hubs; the with-P3 family
    has exactly one starred branch on up to ``p3_hubs`` hubs.
    """
    rows = []
    for n in n_values:
        a = _best_point(n, allow_p3=False, allowed_branches=allowed_branches, max_hubs=no_p3_hubs)
        b = _best_point(n, require_p3=True, allowed_branches=allowed_branches, max_hubs=p3_hubs)
        rows.append(ConjectureRow(n, a, b))
    return rows


def b2_in_family_min(n: int, allowed_branches=None) -> bool:
    """Whether a composition with a B_2 or B_2* branch attains the family minimum."""
    r = family_min(n, allow_p3=True, allowed_branches=allowed_branches)
    return any(any(b.k == 2 for b in s.branches) for s in r.minima if isinstance(s, KragujevacSpec))


# -- cache ---------------------------------------------------------------------


def code_version() -> str:
    """Hash of the sources that determine search results."""
    h = hashlib.sha256()
    here = Path(__file__).parent
    for name in ("tree.py", "generators.py", "greedy.py", "search.py"):
        h.update((here / name).read_bytes())
    return h.hexdigest()[:16]


def _cache_key(n, scope, params) -> str:
    return json.dumps({"n": n, "scope": scope, "params": params, "version": code_version()}, sort_keys=True)


def cache_store(report: SearchReport, directory) -> Path:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    path = path / "search.jsonl"
    line = json.dumps({"key": _cache_key(report.n, report.scope, report.params), "report": report.to_dict()},
                      sort_keys=True)
    with path.open("a", encoding="utf-8") as fh:
        fh.write(line + "\n")
    return path


def cache_load(n: int, scope: str, params: dict, directory):
    """The most recent cached report for this key, or None."""
    path = Path(directory) / "search.jsonl"
    if not path.exists():
        return None
    key = _cache_key(n, scope, params)
    found = None
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            try:
                entry = json.loads(line)
            except json.JSONDecodeError:
                continue
            if entry.get("key") == key:
                found = entry["report"]
    if found is None:
        return None
    report = SearchReport.from_dict(found)
    report.provenance = f"cache:{path}"
    return report
