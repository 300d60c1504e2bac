"""The tree rewrites T and T1..T6, each checked against its closed-form ABC change.

Every rewrite keeps the order of the tree. Several of them need a spare
vertex; it is taken from a B_3* branch ``r - a - b - l`` by replacing the
path ``a - b - l`` with ``a - l``. This frees ``b`` without changing the
index, because ``f(2, 2) = f(2, 1)``. The freed vertex then becomes the
new hub (T1, T4, T6) or the leaf partner of a vertex parked below ``r``
(T2, T3).

A :class:`TransformRecord` holds both trees, the exact change, the closed
form and the relation between them: ``eq`` for an identity, ``le`` when
the closed form is an upper bound.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from . import gfuncs
from .errors import NonIntegralTarget, PreconditionViolated
from .generators import TreeBuilder
from .tree import BranchKind, Tree, abc_delta, branch_kind_at

REL_TOL = 1e-10
B3 = BranchKind(3)
B3S = BranchKind(3, star=True)
NAMES = ("T", "T1", "T2", "T3", "T4", "T5", "T6")


@dataclass(frozen=True)
class TransformSpec:
    name: str
    anchors: dict
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "anchors": dict(self.anchors), "params": dict(self.params)}


@dataclass
class TransformRecord:
    spec: TransformSpec
    before: Tree
    after: Tree
    delta_exact: float
    delta_closed_form: float
    relation: str  # "eq" or "le"
    expected_degrees: dict  # vertex -> degree after the rewrite; others unchanged

    @property
    def matched(self) -> bool:
        return _relation_holds(self.delta_exact, self.delta_closed_form, self.relation)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "before": self.before.to_dict(),
            "after": self.after.to_dict(),
            "delta_exact": self.delta_exact,
            "delta_closed_form": self.delta_closed_form,
            "relation": self.relation,
            "matched": self.matched,
            "expected_degrees": {str(k): v for k, v in sorted(self.expected_degrees.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _relation_holds(exact, closed, relation) -> bool:
    if relation == "eq":
        return abs(exact - closed) < REL_TOL
    return exact <= closed + REL_TOL


def audit_transform(r: TransformRecord) -> bool:
    """Order kept, degrees changed exactly as recorded, and the delta relation satisfied."""
    before, after = r.before, r.after
    if not isinstance(after, Tree) or after.n != before.n:
        return False
    try:
        Tree(after.n, after.edges)
    except ValueError:
        return False
    for v in range(before.n):
        if after.degree(v) != r.expected_degrees.get(v, before.degree(v)):
            return False
    return r.matched


# -- helpers ------------------------------------------------------------------


class _Rewrite:
    """Mutable edge set over a fixed vertex range."""

    def __init__(self, t: Tree):
        self.t = t
        self.edges = {tuple(e) for e in t.edges}

    def remove(self, u, v):
        e = (min(u, v), max(u, v))
        if e not in self.edges:
            raise AssertionError(f"edge {e} missing")
        self.edges.remove(e)

    def add(self, u, v):
        self.edges.add((min(u, v), max(u, v)))

    def move(self, child, old, new):
        self.remove(child, old)
        self.add(child, new)

    def build(self) -> Tree:
        return Tree(self.t.n, sorted(self.edges))


def _require(cond, clause, detail=""):
    if not cond:
        raise PreconditionViolated(clause, detail)


def _check_vertex(t: Tree, *vs):
    for v in vs:
        _require(isinstance(v, int) and 0 <= v < t.n, "anchor is a vertex of the tree", f"got {v!r}")


def _children(t: Tree, v: int, parent) -> list:
    return [c for c in t.neighbors(v) if c != parent]


def _kinds(t: Tree, v: int, parent) -> dict:
    return {c: branch_kind_at(t, v, c) for c in _children(t, v, parent)}


def _only(t, v, parent, allowed, who):
    kinds = _kinds(t, v, parent)
    bad = [c for c, k in kinds.items() if k not in allowed]
    _require(not bad, f"{who} has only {'/'.join(map(str, allowed))} children", f"vertex {bad[0]} is not" if bad else "")
    return kinds


def _star_child(kinds: dict, who: str) -> int:
    stars = [c for c, k in kinds.items() if k == B3S]
    _require(len(stars) >= 1, f"{who} parents a B3* branch")
    return stars[0]


def _star_path(t: Tree, r: int):
    """The length-3 path ``r - a - b - l`` of the B_3* branch rooted at ``r``."""
    for a in t.neighbors(r):
        if t.degree(a) != 2:
            continue
        b = next(c for c in t.neighbors(a) if c != r)
        if t.degree(b) == 2:
            l = next(c for c in t.neighbors(b) if c != a)
            return a, b, l
    raise PreconditionViolated("B3* branch has a pendent path of length 3", f"root {r}")


def _free_spare(rw: _Rewrite, a: int, b: int, l: int):
    rw.remove(a, b)
    rw.remove(b, l)
    rw.add(a, l)


def _record(name, anchors, params, t, rw, closed, relation, expected) -> TransformRecord:
    after = rw.build()
    return TransformRecord(TransformSpec(name, anchors, params), t, after,
                           abc_delta(t, after), float(closed), relation, expected)


# -- the rewrites --------------------------------------------------------------


def apply_T(t: Tree, x: int, y: int, z: int) -> TransformRecord:
    """Move one B_3 branch from x to its sibling y."""
    _check_vertex(t, x, y, z)
    _require(x != y and x in t.neighbors(z) and y in t.neighbors(z), "x, y children of z")
    dx, dy, dz = t.degree(x), t.degree(y), t.degree(z)
    _require(dx >= dy, "d(x) >= d(y)", f"{dx} < {dy}")
    kx = _only(t, x, z, (B3,), "x")
    _only(t, y, z, (B3,), "y")
    _require(kx, "x has a B3 child")
    moved = min(kx)
    rw = _Rewrite(t)
    rw.move(moved, x, y)
    closed = gfuncs.g1_prop(dz, dx - dy, dy)
    return _record("T", {"x": x, "y": y, "z": z, "moved": moved}, {"dz": dz, "delta": dx - dy, "dy": dy},
                   t, rw, closed, "eq", {x: dx - 1, y: dy + 1})


def _default_yp(t: Tree, y: int, x: int) -> int:
    cands = [v for v in t.neighbors(y) if v != x]
    _require(cands, "y has a neighbour other than x")
    return max(cands, key=lambda v: (t.degree(v), -v))


def _x_is_minimal(t: Tree, x: int, y: int, exclude):
    """x has the least degree among y's children, and none of them roots a B_3 branch."""
    dx = t.degree(x)
    for v in t.neighbors(y):
        if v == x or v in exclude:
            continue
        _require(branch_kind_at(t, y, v) != B3, "y has no B3 child", f"vertex {v}")
        _require(t.degree(v) >= dx, "d(x) is minimal among the children of y", f"d({v}) = {t.degree(v)} < {dx}")


def apply_T1(t: Tree, x: int, y: int, yp: int = None) -> TransformRecord:
    """Split x's branches between x and a freed vertex u that is attached to y.

    ``yp`` is y's parent, whose edge the closed form leaves out
    (default: y's largest-degree neighbour other than x).
    """
    _check_vertex(t, x, y)
    _require(x in t.neighbors(y), "x is a child of y")
    yp = _default_yp(t, y, x) if yp is None else yp
    _check_vertex(t, yp)
    _require(yp in t.neighbors(y) and yp != x, "y_p is a neighbour of y other than x")
    _require(t.degree(yp) >= 2, "d(y_p) >= 2")
    dx, dy = t.degree(x), t.degree(y)
    _require(dx >= 3, "d(x) >= 3")
    _x_is_minimal(t, x, y, (yp,))
    kinds = _only(t, x, y, (B3, B3S), "x")
    r = _star_child(kinds, "x")
    a, b, l = _star_path(t, r)
    hi, lo = math.ceil((dx - 1) / 2), (dx - 1) // 2
    movable = sorted(c for c in kinds if c != r)[:lo]
    rw = _Rewrite(t)
    _free_spare(rw, a, b, l)
    for c in movable:
        rw.move(c, x, b)
    rw.add(y, b)
    siblings = [t.degree(v) for v in t.neighbors(y) if v not in (x, yp)]
    closed = gfuncs.g1_case1(dx, dy, siblings)
    return _record("T1", {"x": x, "y": y, "y_p": yp, "u": b}, {"dx": dx, "dy": dy, "dxi": siblings},
                   t, rw, closed, "le", {x: hi + 1, b: lo + 1, y: dy + 1})


def apply_T2(t: Tree, x: int, w: int, y: int, yp: int = None) -> TransformRecord:
    """Merge w's branches into x and park w, as a degree-2 vertex, below x's B_3* root.

    ``yp``, when given, is y's parent and is skipped by the minimality check.
    """
    _check_vertex(t, x, w, y)
    _require(x != w and x in t.neighbors(y) and w in t.neighbors(y), "x, w children of y")
    if yp is not None:
        _check_vertex(t, yp)
        _require(yp in t.neighbors(y) and yp not in (x, w), "y_p is a neighbour of y other than x, w")
    dx, dw, dy = t.degree(x), t.degree(w), t.degree(y)
    _require(dy >= 3, "d(y) >= 3")
    _require(dx <= dw, "d(x) <= d(w)", f"{dx} > {dw}")
    _x_is_minimal(t, x, y, (yp,))
    kx = _only(t, x, y, (B3, B3S), "x")
    kw = _only(t, w, y, (B3,), "w")
    r = _star_child(kx, "x")
    _a, b, l = _star_path(t, r)
    rw = _Rewrite(t)
    for c in kw:
        rw.move(c, w, x)
    rw.remove(w, y)
    rw.remove(b, l)
    rw.add(r, w)
    rw.add(w, l)
    others = [t.degree(v) for v in t.neighbors(y) if v not in (x, w)]
    closed = gfuncs.t2_change(dx, dy, dw, others)
    return _record("T2", {"x": x, "w": w, "y": y, "r": r}, {"dx": dx, "dw": dw, "dy": dy, "others": others},
                   t, rw, closed, "le",
                   {x: dx + dw - 1, w: 2, y: dy - 1, r: 5, b: 1})


def _root_with_unique_big_child(t: Tree, x: int, z: int):
    _check_vertex(t, x, z)
    _require(x in t.neighbors(z), "x is a child of z")
    kz = _kinds(t, z, x)
    bad = [c for c, k in kz.items() if k not in (B3, B3S)]
    _require(not bad, "x is the unique big child of z (all other children B3/B3*)",
             f"vertex {bad[0]} is not" if bad else "")
    return kz


def apply_T3(t: Tree, x: int, z: int) -> TransformRecord:
    """Lift x's branches to the root z and park x below its B_3* root."""
    kz = _root_with_unique_big_child(t, x, z)
    _only(t, x, z, (B3, B3S), "x")
    _require(all(k == B3 for k in kz.values()), "z's other children are B3")
    kx = _kinds(t, x, z)
    r = _star_child(kx, "x")
    _a, b, l = _star_path(t, r)
    dx, dz = t.degree(x), t.degree(z)
    rw = _Rewrite(t)
    rw.remove(z, x)
    rw.move(r, x, z)
    for c in kx:
        if c != r:
            rw.move(c, x, z)
    rw.add(r, x)
    rw.remove(b, l)
    rw.add(x, l)
    closed = gfuncs.g3(dx, dz)
    return _record("T3", {"x": x, "z": z, "r": r}, {"dx": dx, "dz": dz}, t, rw, closed, "eq",
                   {z: dz + dx - 2, x: 2, r: 5, b: 1})


def t4_targets(dx: int, dz: int) -> tuple:
    s = dx + dz - 2
    if s % 10:
        raise NonIntegralTarget(f"d(x) + d(z) - 2 = {s} is not a multiple of 10")
    return 3 * s // 10 + 1, 3 * s // 10 + 1, 4 * s // 10 + 2


def t4_feasible(dx: int, dz: int) -> bool:
    """Integral targets that the branches of x and z can actually fill."""
    try:
        nx_, _nu, nz = t4_targets(dx, dz)
    except NonIntegralTarget:
        return False
    return nx_ >= dx or dz - nz + 1 >= 0


def apply_T4(t: Tree, x: int, z: int) -> TransformRecord:
    """Redistribute the branches of x and z over x, z and a freed hub u in ratio 3:4:3."""
    kz = _root_with_unique_big_child(t, x, z)
    kx = _only(t, x, z, (B3, B3S), "x")
    dx, dz = t.degree(x), t.degree(z)
    nx_, nu, nz = t4_targets(dx, dz)
    stars = [c for c, k in {**kx, **kz}.items() if k == B3S]
    _require(len(stars) == 1, "exactly one B3* among the children of x and z")
    _a, b, l = _star_path(t, stars[0])
    xs, zs = sorted(kx), sorted(kz)
    rw = _Rewrite(t)
    _free_spare(rw, _a, b, l)
    rw.add(z, b)
    if nx_ < dx:
        _require(dz - nz + 1 >= 0, "d(z) - d'(z) + 1 >= 0")
        to_u = xs[nx_ - 1:] + zs[nz - 2:]
        for c in xs[nx_ - 1:]:
            rw.move(c, x, b)
        for c in zs[nz - 2:]:
            rw.move(c, z, b)
        closed = gfuncs.g41(dx, dz)
    else:
        give_x = zs[: nx_ - dx]
        give_u = zs[nx_ - dx: nx_ - dx + nu - 1]
        for c in give_x:
            rw.move(c, z, x)
        for c in give_u:
            rw.move(c, z, b)
        to_u = give_u
        closed = gfuncs.g42(dx, dz)
    _require(len(to_u) == nu - 1, "target degrees are reachable", f"u would get {len(to_u) + 1}")
    return _record("T4", {"x": x, "z": z, "u": b}, {"dx": dx, "dz": dz, "targets": [nx_, nu, nz]},
                   t, rw, closed, "le", {x: nx_, b: nu, z: nz})


def apply_T5(t: Tree, x: int, z: int) -> TransformRecord:
    """Move one B_3 branch from the root z down to its big child x."""
    kz = _root_with_unique_big_child(t, x, z)
    _require(all(k == B3 for k in kz.values()), "z's other children are B3")
    _only(t, x, z, (B3,), "x")
    _require(kz, "z has a B3 child besides x")
    dx, dz = t.degree(x), t.degree(z)
    moved = min(kz)
    rw = _Rewrite(t)
    rw.move(moved, z, x)
    closed = gfuncs.g5(dx, dz)
    return _record("T5", {"x": x, "z": z, "moved": moved}, {"dx": dx, "dz": dz}, t, rw, closed, "eq",
                   {x: dx + 1, z: dz - 1})


def apply_T6(t: Tree, z: int) -> TransformRecord:
    """Split the centre of an improper B_3/B_3* Kragujevac tree into two adjacent hubs."""
    _check_vertex(t, z)
    kinds = _only(t, z, None, (B3, B3S), "z")
    r = _star_child(kinds, "z")
    _require(sum(k == B3S for k in kinds.values()) == 1, "exactly one B3* branch")
    a, b, l = _star_path(t, r)
    dz = t.degree(z)
    _require(dz >= 2, "d(z) >= 2")
    hi, lo = math.ceil(dz / 2), dz // 2
    rw = _Rewrite(t)
    _free_spare(rw, a, b, l)
    for c in sorted(kinds)[:hi]:
        rw.move(c, z, b)
    rw.add(z, b)
    closed = gfuncs.g6(dz)
    return _record("T6", {"z": z, "u": b}, {"dz": dz}, t, rw, closed, "eq", {z: lo + 1, b: hi + 1})


APPLY = {"T": apply_T, "T1": apply_T1, "T2": apply_T2, "T3": apply_T3,
         "T4": apply_T4, "T5": apply_T5, "T6": apply_T6}
ANCHORS = {"T": ("x", "y", "z"), "T1": ("x", "y", "yp"), "T2": ("x", "w", "y", "yp"), "T3": ("x", "z"),
           "T4": ("x", "z"), "T5": ("x", "z"), "T6": ("z",)}


def apply_transform(name: str, t: Tree, **anchors) -> TransformRecord:
    if name not in APPLY:
        raise KeyError(f"unknown transformation {name!r}; known: {', '.join(NAMES)}")
    return APPLY[name](t, **{k: v for k, v in anchors.items() if v is not None})


# -- host trees ----------------------------------------------------------------


def _hub(b: TreeBuilder, parent, n_b3: int, star: bool = False) -> int:
    """A vertex (below ``parent``, or vertex 0) with ``n_b3`` B_3 children and maybe one B_3*."""
    v = 0 if parent is None else b.add_vertex(parent)
    if star:
        b.add_branch(v, B3S)
    for _ in range(n_b3):
        b.add_branch(v, B3)
    return v


def host_T(dz: int, dx: int, dy: int):
    b = TreeBuilder()
    z = _hub(b, None, 0)
    x = _hub(b, z, dx - 1)
    y = _hub(b, z, dy - 1)
    for _ in range(dz - 2):
        b.add_branch(z, B3)
    return b.build(), {"x": x, "y": y, "z": z}


def host_T1(dx: int, dy: int, siblings=None, dyp: int = 2):
    """y with parent y_p, child x (one B_3* and B_3s) and d(y) - 2 sibling hubs.

    Siblings default to degree d(x), the worst case for the bound.
    """
    siblings = [dx] * (dy - 2) if siblings is None else list(siblings)
    _require(len(siblings) == dy - 2, "y has d(y) - 2 siblings of x", f"got {len(siblings)}")
    b = TreeBuilder()
    yp = _hub(b, None, dyp - 1)
    y = b.add_vertex(yp)
    x = _hub(b, y, dx - 2, star=True)
    for d in siblings:
        _hub(b, y, d - 1)
    return b.build(), {"x": x, "y": y, "yp": yp}


def host_T2(dx: int, dw: int, others=()):
    """Root y with children x (has the B_3*), w, and further hubs of the given degrees."""
    b = TreeBuilder()
    y = _hub(b, None, 0)
    x = _hub(b, y, dx - 2, star=True)
    w = _hub(b, y, dw - 1)
    for d in others:
        _hub(b, y, d - 1)
    return b.build(), {"x": x, "w": w, "y": y}


def host_T3(dx: int, dz: int):
    b = TreeBuilder()
    z = _hub(b, None, 0)
    x = _hub(b, z, dx - 2, star=True)
    for _ in range(dz - 1):
        b.add_branch(z, B3)
    return b.build(), {"x": x, "z": z}


host_T4 = host_T3


def host_T5(dx: int, dz: int):
    b = TreeBuilder()
    z = _hub(b, None, 0)
    x = _hub(b, z, dx - 1)
    for _ in range(dz - 1):
        b.add_branch(z, B3)
    return b.build(), {"x": x, "z": z}


def host_T6(dz: int):
    b = TreeBuilder()
    z = _hub(b, None, dz - 1, star=True)
    return b.build(), {"z": z}


def random_instance(name: str, rng: random.Random, lo: int = 4, hi: int = 14):
    """A random host for ``name`` that meets its preconditions by construction."""
    d = lambda a=lo, b=hi: rng.randint(a, b)  # noqa: E731
    if name == "T":
        dy = d()
        return host_T(d(2), dy + rng.randint(0, 4), dy)
    if name == "T1":
        dx, dy = d(), d(3)
        sib = [dx + rng.randint(0, 3) for _ in range(dy - 2)]
        return host_T1(dx, dy, sib, d(2))
    if name == "T2":
        dx = d()
        return host_T2(dx, dx + rng.randint(0, 3), [dx + rng.randint(0, 3) for _ in range(rng.randint(1, 3))])
    if name == "T3":
        return host_T3(d(), d(2))
    if name == "T4":
        while True:
            dx, dz = d(), d(2, 3 * hi)
            if t4_feasible(dx, dz):
                return host_T4(dx, dz)
    if name == "T5":
        return host_T5(d(), d(2))
    if name == "T6":
        return host_T6(d(2))
    raise KeyError(name)
