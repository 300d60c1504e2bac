"""Greedy trees: the ABC minimizer for a prescribed degree sequence.

Vertices are labeled in breadth-first order and receive the degrees of the
sorted sequence one by one, so a parent processed earlier always takes the
larger available degrees for its children. Ties are resolved by position,
which makes the construction fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CapExceeded, NotRealizable
from .tree import DegreeSequence, RootedTree, Tree, abc_index

MATCH_TOL = 1e-12


@dataclass
class GreedyBuildTrace:
    assignment: list = field(default_factory=list)  # (vertex, degree) in labeling order
    rooted: RootedTree = None


def _as_sequence(ds) -> DegreeSequence:
    if not isinstance(ds, DegreeSequence):
        ds = DegreeSequence(ds)
    return ds.check()


def greedy_trace(ds) -> GreedyBuildTrace:
    ds = _as_sequence(ds)
    degs = ds.values
    n = len(degs)
    trace = GreedyBuildTrace()
    trace.assignment.append((0, degs[0]))
    if n == 1:
        trace.rooted = RootedTree(Tree(1, []), 0)
        return trace
    edges = []
    nxt = 1
    for v in range(n):
        want = degs[v] if v == 0 else degs[v] - 1
        for _ in range(want):
            if nxt >= n:
                raise NotRealizable(f"ran out of vertices while expanding vertex {v}")
            edges.append((v, nxt))
            trace.assignment.append((nxt, degs[nxt]))
            nxt += 1
    trace.rooted = RootedTree(Tree(n, edges), 0)
    return trace


def build_greedy(ds) -> RootedTree:
    """Greedy tree of ``ds`` rooted at its maximum-degree vertex (vertex 0)."""
    return greedy_trace(ds).rooted


@dataclass
class OptimalityResult:
    optimal: bool
    greedy_abc: float
    best_abc: float
    realizations: int
    witness: Tree = None


def realizations(ds, cap: int):
    """All trees (up to isomorphism) with degree sequence ``ds``.

    Raises :class:`CapExceeded` as soon as more than ``cap`` are found.
    """
    from .generators import enumerate_free_trees

    ds = _as_sequence(ds)
    out = []
    for t in enumerate_free_trees(len(ds)):
        if tuple(sorted(t.degrees, reverse=True)) == ds.values:
            out.append(t)
            if len(out) > cap:
                raise CapExceeded(f"more than {cap} realizations of {list(ds.values)}")
    return out


def greedy_is_optimal(ds, oracle_cap: int = 10_000) -> OptimalityResult:
    ds = _as_sequence(ds)
    g = abc_index(build_greedy(ds).tree)
    trees = realizations(ds, oracle_cap)
    best, witness = g, None
    for t in trees:
        a = abc_index(t)
        if a < best:
            best, witness = a, t
    ok = not (best < g - MATCH_TOL)
    return OptimalityResult(ok, g, best, len(trees), None if ok else witness)
