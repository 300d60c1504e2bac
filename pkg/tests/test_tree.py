import math
import random

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from abcmin.errors import DomainError, InvalidTree, NotBranchShaped, NotRealizable
from abcmin.generators import BranchKind, KragujevacSpec, make_branch, make_kragujevac
from abcmin.tree import (
    DegreeSequence,
    RootedTree,
    Tree,
    abc_delta,
    abc_index,
    abc_terms,
    canonical_code,
    centroids,
    classify_branches,
    count_p3,
    edge_f,
    internal_paths,
    is_big,
    pendent_paths,
)


@st.composite
def trees(draw, min_n=1, max_n=30):
    n = draw(st.integers(min_n, max_n))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    return Tree(n, [(p, i + 1) for i, p in enumerate(parents)])


def to_nx(t):
    g = nx.Graph()
    g.add_nodes_from(range(t.n))
    g.add_edges_from(t.edges)
    return g


class TestEdgeF:
    @pytest.mark.parametrize("a,b,expected", [
        (1, 1, 0.0),
        (2, 2, 0.7071067811865476),
        (3, 1, 0.816496580927726),
        (2, 1, 0.7071067811865476),
    ])
    def test_values(self, a, b, expected):
        assert edge_f(a, b) == pytest.approx(expected, abs=1e-15)

    def test_symmetric(self):
        for a in range(1, 30):
            for b in range(1, 30):
                assert edge_f(a, b) == edge_f(b, a)

    def test_degree_two_is_constant(self):
        for b in range(1, 200):
            assert edge_f(2, b) == pytest.approx(math.sqrt(0.5), abs=1e-15)

    @pytest.mark.parametrize("a,b", [(0, 3), (3, 0), (-1, 2)])
    def test_domain(self, a, b):
        with pytest.raises(DomainError):
            edge_f(a, b)


class TestABCIndex:
    def test_p4_exact(self):
        assert abc_index(Tree.path(4)) == 2.1213203435596424

    def test_star_exact(self):
        assert abc_index(Tree.star(4)) == pytest.approx(3.4641016151377544, abs=1e-15)

    def test_single_edge_is_zero(self):
        assert abc_index(Tree.path(2)) == 0.0

    def test_single_vertex(self):
        assert abc_index(Tree(1, [])) == 0.0

    @pytest.mark.parametrize("n", range(4, 201, 7))
    def test_path_formula(self, n):
        assert abc_index(Tree.path(n)) == pytest.approx((n - 1) * math.sqrt(0.5), rel=1e-14)

    @pytest.mark.parametrize("n", range(4, 201, 7))
    def test_star_formula(self, n):
        expected = (n - 1) * math.sqrt((n - 2) / (n - 1))
        assert abc_index(Tree.star(n - 1)) == pytest.approx(expected, rel=1e-14)

    @given(trees(min_n=2))
    def test_matches_term_sum(self, t):
        assert abc_index(t) == pytest.approx(math.fsum(abc_terms(t)), abs=1e-12)

    @given(trees(min_n=2), st.randoms(use_true_random=False))
    def test_relabel_invariant(self, t, rnd):
        perm = list(range(t.n))
        rnd.shuffle(perm)
        assert abc_index(t.relabel(perm)) == abc_index(t)

    def test_delta(self):
        assert abc_delta(Tree.path(5), Tree.star(4)) == pytest.approx(
            abc_index(Tree.star(4)) - abc_index(Tree.path(5)), abs=1e-15)


class TestValidation:
    @pytest.mark.parametrize("n,edges", [
        (3, [(0, 1)]),  # too few edges
        (3, [(0, 1), (1, 2), (0, 2)]),  # too many edges
        (4, [(0, 1), (1, 0), (2, 3)]),  # duplicate edge
        (3, [(0, 0), (1, 2)]),  # self loop
        (3, [(0, 1), (1, 5)]),  # out of range
        (0, []),
    ])
    def test_rejects(self, n, edges):
        with pytest.raises(InvalidTree):
            Tree(n, edges)

    def test_disconnected(self):
        with pytest.raises(InvalidTree):
            Tree(4, [(0, 1), (0, 1), (2, 3)])

    @given(trees())
    def test_json_round_trip(self, t):
        back = Tree.from_json(t.to_json())
        assert back == t
        assert back.degrees == t.degrees

    def test_from_parents(self):
        t = Tree.from_parents([-1, 0, 0, 1])
        assert t.sorted_edges() == [(0, 1), (0, 2), (1, 3)]


class TestPaths:
    def test_star_k13(self):
        paths = pendent_paths(Tree.star(3))
        assert sorted(p.length for p in paths) == [1, 1, 1]
        assert internal_paths(Tree.star(3)) == []

    @pytest.mark.parametrize("kind,lengths", [
        ("B3", [1, 2, 2, 2]),
        ("B3*", [1, 2, 2, 3]),
    ])
    def test_branch_profile(self, kind, lengths):
        # attach a pendant edge above the root so the root keeps degree > 2
        rt = make_branch(BranchKind.parse(kind))
        t = Tree(rt.n + 1, list(rt.tree.edges) + [(rt.root, rt.n)])
        assert sorted(p.length for p in pendent_paths(t)) == lengths

    def test_double_broom_internal_path(self):
        # two K_{1,3} centres joined by a path of length 3
        edges = [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6), (5, 7)]
        t = Tree(8, edges)
        ip = internal_paths(t)
        assert len(ip) == 1 and ip[0].length == 3 and set(ip[0].endpoints) == {0, 5}
        assert ip[0].vertices[1:-1] in ((3, 4), (4, 3))

    def test_whole_path(self):
        (p,) = pendent_paths(Tree.path(6))
        assert p.whole_tree and p.length == 5

    @given(trees(min_n=3))
    def test_degree_two_vertices_partitioned(self, t):
        if t.max_degree <= 2:
            return
        interiors = []
        for p in pendent_paths(t) + internal_paths(t):
            interiors += list(p.vertices[1:-1])
        assert sorted(interiors) == [v for v in range(t.n) if t.degrees[v] == 2]

    @given(trees(min_n=3))
    def test_pendent_paths_end_at_leaves(self, t):
        if t.max_degree <= 2:
            return
        paths = pendent_paths(t)
        assert sorted(p.endpoints[1] for p in paths) == [v for v in range(t.n) if t.degrees[v] == 1]
        for p in paths:
            assert t.degrees[p.endpoints[0]] > 2

    def test_count_p3(self):
        t = make_kragujevac(KragujevacSpec.parse("B3:4,B3*:1")).tree
        assert count_p3(t) == 1

    def test_is_big(self):
        assert is_big(Tree.star(3), 0)
        t = make_kragujevac(KragujevacSpec.parse("B3:5")).tree
        assert is_big(t, 0)
        assert not is_big(t, t.neighbors(0)[0])


class TestBranches:
    @pytest.mark.parametrize("text,k,star,order", [
        ("B1", 1, False, 3),
        ("B3", 3, False, 7),
        ("B3*", 3, True, 8),
        ("B_2*", 2, True, 6),
        ("b4", 4, False, 9),
    ])
    def test_parse_and_order(self, text, k, star, order):
        kind = BranchKind.parse(text)
        assert (kind.k, kind.star, kind.order) == (k, star, order)
        assert make_branch(kind).n == order

    @pytest.mark.parametrize("bad", ["", "B", "C3", "B0", "B3**"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            BranchKind.parse(bad)

    def test_b3_shape(self):
        rt = make_branch(BranchKind(3))
        assert rt.tree.degrees[rt.root] == 3

    def test_b1_is_path(self):
        rt = make_branch(BranchKind(1))
        assert sorted(rt.tree.degrees) == [1, 1, 2]
        assert rt.tree.degrees[rt.root] == 1

    def test_classify_kragujevac(self):
        rt = make_kragujevac(KragujevacSpec.parse("B3:3,B2:1,B4*:1"))
        assert sorted(map(str, classify_branches(rt))) == ["B2", "B3", "B3", "B3", "B4*"]

    def test_star_not_branch_shaped(self):
        with pytest.raises(NotBranchShaped):
            classify_branches(RootedTree(Tree.star(4), 0))

    def test_levels_kragujevac(self):
        rt = make_kragujevac(KragujevacSpec.parse("B3:4,B3*:1"))
        leaves = [v for v in range(rt.n) if rt.tree.degrees[v] == 1]
        p3_leaf = [p.endpoints[1] for p in pendent_paths(rt.tree) if p.length == 3]
        plain = [rt.level[v] for v in leaves if v not in p3_leaf]
        assert set(plain) == {1}
        assert [rt.level[v] for v in p3_leaf] == [0]
        assert rt.level[rt.root] == 4


class TestCanonical:
    @pytest.mark.parametrize("n", range(1, 10))
    def test_agrees_with_networkx(self, n):
        pool = [Tree.from_parents([-1] + [random.Random(n * 100 + i).randrange(j) for j in range(1, n)])
                for i in range(25)] if n > 1 else [Tree(1, [])]
        for a in pool:
            for b in pool:
                same = canonical_code(a) == canonical_code(b)
                assert same == nx.is_isomorphic(to_nx(a), to_nx(b))

    @given(trees(), st.randoms(use_true_random=False))
    def test_relabel_invariant(self, t, rnd):
        perm = list(range(t.n))
        rnd.shuffle(perm)
        assert canonical_code(t.relabel(perm)) == canonical_code(t)

    @given(trees())
    def test_centroid_count(self, t):
        assert len(centroids(t)) in (1, 2)


class TestDegreeSequence:
    def test_sorted(self):
        assert DegreeSequence([1, 3, 1, 1]).values == (3, 1, 1, 1)

    def test_realizable(self):
        assert DegreeSequence([3, 1, 1, 1]).realizable
        assert not DegreeSequence([3, 3, 1, 1]).realizable

    def test_check_raises(self):
        with pytest.raises(NotRealizable):
            DegreeSequence([2, 2, 2]).check()

    @pytest.mark.parametrize("vals", [[], [3, 0, 1]])
    def test_invalid(self, vals):
        with pytest.raises(NotRealizable):
            DegreeSequence(vals)

    def test_from_internal(self):
        assert DegreeSequence.from_internal([3, 3]).values == (3, 3, 1, 1, 1, 1)

    @given(trees())
    def test_tree_sequences_realizable(self, t):
        assert t.degree_sequence().realizable
