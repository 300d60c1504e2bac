"""Tree families: B_k / B_k* branches, Kragujevac trees, and free-tree enumeration.

Free trees are enumerated as centre-rooted canonical level sequences
(Wright, Richmond, Odlyzko and McKay), each isomorphism class exactly
once. Two slow oracles, labeled Pruefer sequences and leaf extension, both
deduplicated by canonical code, are kept for cross-validation.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import CapExceeded, EmptySpec, MultipleStars
from .tree import (
    BranchKind,
    RootedTree,
    Tree,
    abc_from_degree_pairs,
    canonical_code,
)

DEFAULT_CAP = 24


class TreeBuilder:
    """Incremental edge-list builder; vertex 0 exists from the start."""

    def __init__(self):
        self.n = 1
        self.edges = []

    def add_vertex(self, parent: int) -> int:
        v = self.n
        self.n += 1
        self.edges.append((parent, v))
        return v

    def add_path(self, parent: int, length: int) -> int:
        v = parent
        for _ in range(length):
            v = self.add_vertex(v)
        return v

    def add_branch(self, parent, kind: BranchKind) -> int:
        """Attach a branch below ``parent`` (or start one at vertex 0 when ``parent`` is None)."""
        root = 0 if parent is None else self.add_vertex(parent)
        for i in range(kind.k):
            self.add_path(root, 3 if (kind.star and i == kind.k - 1) else 2)
        return root

    def build(self) -> Tree:
        return Tree(self.n, self.edges)


def make_branch(kind: BranchKind) -> RootedTree:
    b = TreeBuilder()
    b.add_branch(None, kind)
    return RootedTree(b.build(), 0)


@dataclass(frozen=True)
class KragujevacSpec:
    """Central vertex with the listed branches attached to it."""

    branches: tuple

    def __init__(self, branches: Iterable):
        kinds = tuple(sorted((b if isinstance(b, BranchKind) else BranchKind.parse(b)
                              for b in branches), key=lambda b: (-b.k, b.star)))
        if not kinds:
            raise EmptySpec("a Kragujevac tree needs at least one branch")
        if sum(b.star for b in kinds) > 1:
            raise MultipleStars("at most one B_k* branch is allowed")
        object.__setattr__(self, "branches", kinds)

    @classmethod
    def from_counts(cls, counts: dict) -> "KragujevacSpec":
        return cls([kind for kind, m in counts.items() for _ in range(m)])

    @classmethod
    def parse(cls, text: str) -> "KragujevacSpec":
        """Parse ``"B3:58,B3*:1"``; a missing multiplicity means one."""
        kinds = []
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            name, _, mult = item.partition(":")
            kinds += [BranchKind.parse(name)] * (int(mult) if mult else 1)
        return cls(kinds)

    @property
    def central_degree(self) -> int:
        return len(self.branches)

    @property
    def order(self) -> int:
        return 1 + sum(b.order for b in self.branches)

    @property
    def proper(self) -> bool:
        return not any(b.star for b in self.branches)

    def counts(self) -> Counter:
        return Counter(self.branches)

    def abc(self) -> float:
        """Closed-form ABC index; every edge off the centre touches a degree-2 vertex."""
        c = self.central_degree
        pairs = Counter((c, b.k + 1) for b in self.branches)
        pairs[(1, 2)] += self.order - 1 - c
        return abc_from_degree_pairs(pairs)

    def __repr__(self):
        return f"KragujevacSpec({str(self)!r})"

    def __str__(self):
        return ",".join(f"{kind}:{m}" for kind, m in sorted(
            self.counts().items(), key=lambda kv: (-kv[0].k, kv[0].star)))


def make_kragujevac(spec: KragujevacSpec) -> RootedTree:
    b = TreeBuilder()
    for kind in spec.branches:
        b.add_branch(0, kind)
    return RootedTree(b.build(), 0)


@dataclass(frozen=True)
class SplitKragujevacSpec:
    """Two adjacent hubs, each carrying its own branches.

    This is the shape produced by splitting the centre of a Kragujevac tree
    into two hubs.
    """

    left: KragujevacSpec
    right: KragujevacSpec

    @property
    def order(self) -> int:
        return self.left.order + self.right.order

    @property
    def hub_degrees(self) -> tuple:
        return self.left.central_degree + 1, self.right.central_degree + 1

    def abc(self) -> float:
        ca, cb = self.hub_degrees
        pairs = Counter((ca, b.k + 1) for b in self.left.branches)
        pairs.update((cb, b.k + 1) for b in self.right.branches)
        pairs[(ca, cb)] += 1
        spokes = self.left.central_degree + self.right.central_degree
        pairs[(1, 2)] += self.order - 2 - spokes
        return abc_from_degree_pairs(pairs)

    def __str__(self):
        return f"[{self.left}]-[{self.right}]"

    def __repr__(self):
        return f"SplitKragujevacSpec({str(self)!r})"


def make_split_kragujevac(spec: SplitKragujevacSpec) -> RootedTree:
    b = TreeBuilder()
    for kind in spec.left.branches:
        b.add_branch(0, kind)
    other = b.add_vertex(0)
    for kind in spec.right.branches:
        b.add_branch(other, kind)
    return RootedTree(b.build(), 0)


def attach_pendent_path(t: Tree, v: int, length: int) -> Tree:
    edges = list(t.edges)
    prev = v
    for i in range(length):
        edges.append((prev, t.n + i))
        prev = t.n + i
    return Tree(t.n + length, edges)


# -- free tree enumeration ---------------------------------------------


def _next_rooted(seq, p=None):
    """Successor of a canonical level sequence (Beyer-Hedetniemi step), or None."""
    if p is None:
        p = len(seq) - 1
        while seq[p] == 1:
            p -= 1
    if p == 0:
        return None
    q = p - 1
    while seq[q] != seq[p] - 1:
        q -= 1
    out = list(seq)
    for i in range(p, len(out)):
        out[i] = out[i - p + q]
    return out


def _split(seq):
    """Split off the first subtree of the root: (that subtree relevelled, the remainder)."""
    m = len(seq)
    for i in range(2, len(seq)):
        if seq[i] == 1:
            m = i
            break
    return [x - 1 for x in seq[1:m]], [0] + list(seq[m:])


def _is_centre_rooted(seq) -> bool:
    left, rest = _split(seq)
    lh, rh = max(left), max(rest)
    if rh != lh:
        return rh > lh
    if len(left) != len(rest):
        return len(left) < len(rest)
    return left <= rest


def _jump(seq):
    left, _ = _split(seq)
    p = len(left)
    nxt = _next_rooted(seq, p)
    if nxt is not None and seq[p] > 2:
        new_left, _ = _split(nxt)
        suffix = list(range(1, max(new_left) + 2))
        nxt[-len(suffix):] = suffix
    return nxt


def _sequence_to_tree(seq) -> Tree:
    last_at = {}
    edges = []
    for i, lv in enumerate(seq):
        if lv > 0:
            edges.append((last_at[lv - 1], i))
        last_at[lv] = i
    return Tree(len(seq), edges)


def _free_tree_sequences(n: int) -> Iterator[list]:
    if n == 1:
        yield [0]
        return
    seq = list(range(n // 2 + 1)) + list(range(1, (n + 1) // 2))
    while seq is not None:
        while seq is not None and not _is_centre_rooted(seq):
            seq = _jump(seq)
        if seq is None:
            return
        yield seq
        seq = _next_rooted(seq)


class TreeStream:
    """Iterable over every free tree of order ``n``, one per isomorphism class."""

    def __init__(self, n: int, cap: int = DEFAULT_CAP, part: int = 0, parts: int = 1):
        if n < 1:
            raise ValueError("order must be >= 1")
        if n > cap:
            raise CapExceeded(f"order {n} exceeds enumeration cap {cap}")
        self.n = n
        self.cap = cap
        self.part = part
        self.parts = parts

    def __iter__(self) -> Iterator[Tree]:
        for i, seq in enumerate(_free_tree_sequences(self.n)):
            if i % self.parts == self.part:
                yield _sequence_to_tree(seq)

    def partitions(self, k: int) -> list:
        """Split into ``k`` disjoint streams by position; each is iterable on its own."""
        return [TreeStream(self.n, self.cap, i, k) for i in range(k)]

    def __reduce__(self):
        return (TreeStream, (self.n, self.cap, self.part, self.parts))


def enumerate_free_trees(n: int, cap: int = DEFAULT_CAP) -> TreeStream:
    return TreeStream(n, cap)


# -- slow oracles --------------------------------------------------------


def _prufer_to_tree(seq, n) -> Tree:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = next(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [i for i in range(n) if degree[i] == 1]
    edges.append((u, v))
    return Tree(n, edges)


def free_trees_from_labeled(n: int) -> list:
    """Every labeled tree on ``n`` vertices, reduced to one representative per class."""
    if n <= 2:
        return [Tree(n, [(0, 1)] if n == 2 else [])]
    seen = {}
    for seq in itertools.product(range(n), repeat=n - 2):
        t = _prufer_to_tree(seq, n)
        seen.setdefault(canonical_code(t), t)
    return list(seen.values())


def free_trees_by_extension(n: int) -> list:
    """Classes of order ``n`` grown by hanging a leaf on every vertex of every smaller class."""
    level = {canonical_code(Tree(1, [])): Tree(1, [])}
    for m in range(2, n + 1):
        nxt = {}
        for t in level.values():
            for v in range(t.n):
                grown = attach_pendent_path(t, v, 1)
                nxt.setdefault(canonical_code(grown), grown)
        level = nxt
    return list(level.values())
