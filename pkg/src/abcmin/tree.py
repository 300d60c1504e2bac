"""Tree data model, the ABC index and the structural predicates used on minimal trees.

A :class:`Tree` is an immutable labeled free tree on vertices ``0..n-1``.
Degrees and adjacency are derived once at construction and cached.
"""

from __future__ import annotations

import decimal
import functools
import json
import math
import re
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import DomainError, InvalidTree, NotBranchShaped, NotRealizable

SQRT_HALF = math.sqrt(0.5)


def edge_f(a: float, b: float) -> float:
    """Per-edge ABC contribution ``sqrt((a + b - 2) / (a b))``.

    Real arguments are accepted on purpose: the change-function analysis
    evaluates ``f`` at non-integer degree surrogates such as ``d/2 + 0.5``.
    """
    if a < 1 or b < 1:
        raise DomainError(f"edge_f requires a, b >= 1, got ({a}, {b})")
    return math.sqrt((a + b - 2) / (a * b))


class Tree:
    """Labeled free tree. Validated on construction, never mutated afterwards."""

    __slots__ = ("n", "edges", "degrees", "_adj")

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        n = int(n)
        if n < 1:
            raise InvalidTree("a tree needs at least one vertex")
        norm = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidTree(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
            if u == v:
                raise InvalidTree(f"self-loop at vertex {u}")
            norm.append((u, v) if u < v else (v, u))
        if len(norm) != n - 1:
            raise InvalidTree(f"expected {n - 1} edges, got {len(norm)}")
        if len(set(norm)) != len(norm):
            raise InvalidTree("duplicate edge")
        adj = [[] for _ in range(n)]
        for u, v in norm:
            adj[u].append(v)
            adj[v].append(u)
        # n-1 edges + connected implies acyclic
        seen = [False] * n
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    count += 1
                    stack.append(w)
        if count != n:
            raise InvalidTree("graph is not connected")
        self.n = n
        self.edges = tuple(norm)
        self.degrees = tuple(len(a) for a in adj)
        self._adj = tuple(tuple(sorted(a)) for a in adj)

    def neighbors(self, v: int) -> tuple:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return self.degrees[v]

    @property
    def max_degree(self) -> int:
        return max(self.degrees)

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def relabel(self, perm: Sequence[int]) -> "Tree":
        """Return the tree with vertex ``v`` renamed to ``perm[v]``."""
        return Tree(self.n, [(perm[u], perm[v]) for u, v in self.edges])

    def degree_sequence(self) -> "DegreeSequence":
        return DegreeSequence(self.degrees)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Tree":
        return cls(data["n"], data["edges"])

    @classmethod
    def from_json(cls, text: str) -> "Tree":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_parents(cls, parents: Sequence[int]) -> "Tree":
        """Build from a parent array where the root has parent ``-1``."""
        return cls(len(parents), [(i, p) for i, p in enumerate(parents) if p >= 0])

    @classmethod
    def path(cls, n: int) -> "Tree":
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def star(cls, leaves: int) -> "Tree":
        return cls(leaves + 1, [(0, i) for i in range(1, leaves + 1)])

    def __eq__(self, other):
        if not isinstance(other, Tree):
            return NotImplemented
        return self.n == other.n and sorted(self.edges) == sorted(other.edges)

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.edges))))

    def __repr__(self):
        return f"Tree(n={self.n}, edges={self.sorted_edges()!r})"


def abc_terms(t: Tree) -> list:
    d = t.degrees
    return [edge_f(d[u], d[v]) for u, v in t.edges]


_CTX = decimal.Context(prec=40)


@functools.lru_cache(maxsize=None)
def _exact_term(a: int, b: int) -> decimal.Decimal:
    return _CTX.sqrt(_CTX.divide(decimal.Decimal(a + b - 2), decimal.Decimal(a * b)))


def _pair_sum(pairs: dict) -> decimal.Decimal:
    total = decimal.Decimal(0)
    for (a, b), count in pairs.items():
        total = _CTX.add(total, _CTX.multiply(decimal.Decimal(count), _exact_term(min(a, b), max(a, b))))
    return total


def degree_pairs(t: Tree) -> Counter:
    d = t.degrees
    return Counter((min(d[u], d[v]), max(d[u], d[v])) for u, v in t.edges)


def abc_from_degree_pairs(pairs: dict) -> float:
    """ABC index from edge counts per degree pair, correctly rounded to a double.

    Terms are summed with 40 significant digits, so the result does not
    depend on edge order or labeling.
    """
    for a, b in pairs:
        if a < 1 or b < 1:
            raise DomainError(f"degrees must be >= 1, got ({a}, {b})")
    return float(_pair_sum(pairs))


def abc_index(t: Tree) -> float:
    """ABC index of ``t``, correctly rounded."""
    return abc_from_degree_pairs(degree_pairs(t))


def abc_delta(before: Tree, after: Tree) -> float:
    """``abc_index(after) - abc_index(before)``, correctly rounded (no cancellation loss)."""
    return float(_CTX.subtract(_pair_sum(degree_pairs(after)), _pair_sum(degree_pairs(before))))


# -- paths ---------------------------------------------------------------


class PathInfo(NamedTuple):
    endpoints: tuple
    length: int
    vertices: tuple
    whole_tree: bool = False


def _whole_tree_path(t: Tree) -> PathInfo:
    if t.n == 1:
        return PathInfo((0, 0), 0, (0,), True)
    ends = [v for v in range(t.n) if t.degrees[v] == 1]
    order = [ends[0]]
    prev = -1
    while len(order) < t.n:
        cur = order[-1]
        nxt = [w for w in t.neighbors(cur) if w != prev]
        prev = cur
        order.append(nxt[0])
    return PathInfo((order[0], order[-1]), t.n - 1, tuple(order), True)


def _walk(t: Tree, start: int, first: int) -> list:
    """Walk from ``start`` through ``first`` and onward while the current vertex has degree 2."""
    seq = [start, first]
    prev, cur = start, first
    while t.degrees[cur] == 2:
        a, b = t.neighbors(cur)
        prev, cur = cur, (b if a == prev else a)
        seq.append(cur)
    return seq


def pendent_paths(t: Tree) -> list:
    """All pendent paths ``v0 .. vk`` with ``d(v0) > 2`` and ``d(vk) = 1``.

    A tree without a vertex of degree > 2 is reported as one entry with
    ``whole_tree=True``.
    """
    if t.n == 1 or max(t.degrees) <= 2:
        return [_whole_tree_path(t)]
    out = []
    for leaf in range(t.n):
        if t.degrees[leaf] != 1:
            continue
        seq = _walk(t, leaf, t.neighbors(leaf)[0])
        seq.reverse()
        out.append(PathInfo((seq[0], seq[-1]), len(seq) - 1, tuple(seq)))
    return out


def internal_paths(t: Tree) -> list:
    """Paths whose interior vertices have degree 2 and whose two ends have degree > 2."""
    out = []
    for v in range(t.n):
        if t.degrees[v] <= 2:
            continue
        for w in t.neighbors(v):
            seq = _walk(t, v, w)
            end = seq[-1]
            if t.degrees[end] > 2 and v < end:
                out.append(PathInfo((v, end), len(seq) - 1, tuple(seq)))
    return out


def count_p3(t: Tree) -> int:
    return sum(1 for p in pendent_paths(t) if not p.whole_tree and p.length == 3)


def is_big(t: Tree, v: int) -> bool:
    return t.degrees[v] >= 3 and all(t.degrees[w] != 2 for w in t.neighbors(v))


# -- branches ------------------------------------------------------------

_BRANCH_RE = re.compile(r"^\s*B_?(\d+)\s*(\*|_?star)?\s*$", re.IGNORECASE)


@dataclass(frozen=True, order=True)
class BranchKind:
    """A B_k branch (``star=False``) or a B_k* branch (``star=True``)."""

    k: int
    star: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"branch parameter k must be >= 1, got {self.k}")

    @property
    def order(self) -> int:
        return 2 * self.k + 1 + (1 if self.star else 0)

    @classmethod
    def parse(cls, text: str) -> "BranchKind":
        m = _BRANCH_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse branch kind {text!r} (expected e.g. B3 or B3*)")
        return cls(int(m.group(1)), m.group(2) is not None)

    def __str__(self):
        return f"B{self.k}{'*' if self.star else ''}"


def branch_kind_at(t: Tree, parent: int, v: int):
    """Shape of the subtree hanging from ``v`` away from ``parent``, or ``None``.

    Recognizes B_k (k pendent paths of length 2 from ``v``) and B_k*
    (one of them lengthened to 3).
    """
    lengths = []
    for w in t.neighbors(v):
        if w == parent:
            continue
        length = 1
        prev, cur = v, w
        while True:
            nxt = [x for x in t.neighbors(cur) if x != prev]
            if not nxt:
                break
            if len(nxt) > 1:
                return None
            prev, cur = cur, nxt[0]
            length += 1
        lengths.append(length)
    if not lengths or any(x not in (2, 3) for x in lengths):
        return None
    threes = lengths.count(3)
    if threes > 1:
        return None
    return BranchKind(len(lengths), threes == 1)


class RootedTree:
    """A tree with a designated root and the level representation.

    The root sits on the highest level and levels drop by one per edge
    away from it. Ordinary leaves end on level 1 or 2; the leaf of a
    length-3 pendent path may end one level lower.
    """

    __slots__ = ("tree", "root", "level", "parent", "depth")

    def __init__(self, tree: Tree, root: int = 0):
        if not 0 <= root < tree.n:
            raise InvalidTree(f"root {root} outside 0..{tree.n - 1}")
        self.tree = tree
        self.root = root
        parent = [-1] * tree.n
        depth = [0] * tree.n
        seen = [False] * tree.n
        seen[root] = True
        q = deque([root])
        while q:
            u = q.popleft()
            for w in tree.neighbors(u):
                if not seen[w]:
                    seen[w] = True
                    parent[w] = u
                    depth[w] = depth[u] + 1
                    q.append(w)
        self.parent = tuple(parent)
        self.depth = tuple(depth)
        p3_leaves = set()
        if tree.n > 1 and tree.max_degree > 2:
            p3_leaves = {p.endpoints[1] for p in pendent_paths(tree) if p.length == 3}
        leaves = [v for v in range(tree.n) if tree.degrees[v] == 1 and v != root]
        plain = [depth[v] for v in leaves if v not in p3_leaves]
        dmax = max(depth)
        top = max(max(plain) + 1, dmax) if plain else dmax
        self.level = tuple(top - d for d in depth)

    def children(self, v: int) -> list:
        return [w for w in self.tree.neighbors(v) if w != self.parent[v]]

    @property
    def n(self) -> int:
        return self.tree.n

    def __repr__(self):
        return f"RootedTree(root={self.root}, {self.tree!r})"


def classify_branches(rt: RootedTree) -> list:
    """Branch kinds of the subtrees hanging from the root's children."""
    kinds = []
    for c in rt.children(rt.root):
        kind = branch_kind_at(rt.tree, rt.root, c)
        if kind is None:
            raise NotBranchShaped(c)
        kinds.append(kind)
    return kinds


# -- canonical form ------------------------------------------------------


def centroids(t: Tree) -> list:
    if t.n <= 2:
        return list(range(t.n))
    parent = [-1] * t.n
    order = [0]
    seen = [False] * t.n
    seen[0] = True
    for u in order:
        for w in t.neighbors(u):
            if not seen[w]:
                seen[w] = True
                parent[w] = u
                order.append(w)
    size = [1] * t.n
    for u in reversed(order):
        if parent[u] >= 0:
            size[parent[u]] += size[u]
    best, out = t.n, []
    for v in range(t.n):
        heaviest = t.n - size[v]
        for w in t.neighbors(v):
            if w != parent[v]:
                heaviest = max(heaviest, size[w])
        if heaviest < best:
            best, out = heaviest, [v]
        elif heaviest == best:
            out.append(v)
    return out


def rooted_code(t: Tree, root: int) -> bytes:
    """AHU encoding of ``t`` rooted at ``root``."""
    parent = [-1] * t.n
    order = [root]
    seen = [False] * t.n
    seen[root] = True
    for u in order:
        for w in t.neighbors(u):
            if not seen[w]:
                seen[w] = True
                parent[w] = u
                order.append(w)
    kids = [[] for _ in range(t.n)]
    code = [b""] * t.n
    for u in reversed(order):
        kids[u].sort()
        code[u] = b"(" + b"".join(kids[u]) + b")"
        kids[u] = None
        if parent[u] >= 0:
            kids[parent[u]].append(code[u])
    return code[root]


def canonical_code(t: Tree) -> bytes:
    """Isomorphism-invariant code: AHU at the centroid, smaller code for a centroid pair."""
    return min(rooted_code(t, c) for c in centroids(t))


# -- degree sequences ----------------------------------------------------


class DegreeSequence:
    """Non-increasing multiset of positive vertex degrees."""

    __slots__ = ("values",)

    def __init__(self, values: Iterable[int]):
        vals = tuple(sorted((int(v) for v in values), reverse=True))
        if not vals:
            raise NotRealizable("empty degree sequence")
        if vals[-1] < 0 or (len(vals) > 1 and vals[-1] < 1):
            raise NotRealizable(f"degrees must be positive: {vals}")
        self.values = vals

    @property
    def realizable(self) -> bool:
        n = len(self.values)
        if n == 1:
            return self.values == (0,)
        return sum(self.values) == 2 * (n - 1)

    def check(self) -> "DegreeSequence":
        if not self.realizable:
            raise NotRealizable(
                f"degree sum {sum(self.values)} != 2(n-1) = {2 * (len(self.values) - 1)}"
            )
        return self

    @classmethod
    def from_internal(cls, internal: Iterable[int]) -> "DegreeSequence":
        """Complete a list of non-leaf degrees with the implied number of leaves."""
        internal = [int(d) for d in internal]
        if any(d < 2 for d in internal):
            raise NotRealizable("non-leaf degrees must be >= 2")
        if not internal:
            return cls([1, 1])
        leaves = 2 + sum(d - 2 for d in internal)
        return cls(internal + [1] * leaves)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other):
        if isinstance(other, DegreeSequence):
            return self.values == other.values
        return NotImplemented

    def __hash__(self):
        return hash(self.values)

    def __repr__(self):
        return f"DegreeSequence({list(self.values)})"
