import pickle

import pytest

from abcmin.errors import CapExceeded, EmptySpec, MultipleStars
from abcmin.generators import (
    BranchKind,
    KragujevacSpec,
    SplitKragujevacSpec,
    attach_pendent_path,
    enumerate_free_trees,
    free_trees_by_extension,
    free_trees_from_labeled,
    make_kragujevac,
    make_split_kragujevac,
)
from abcmin.tree import RootedTree, Tree, abc_index, branch_kind_at, canonical_code, classify_branches, pendent_paths

# number of unlabeled trees on n vertices
FREE_TREE_COUNTS = {1: 1, 2: 1, 3: 1, 4: 2, 5: 3, 6: 6, 7: 11, 8: 23, 9: 47, 10: 106,
                    11: 235, 12: 551, 13: 1301, 14: 3159}


class TestEnumeration:
    @pytest.mark.parametrize("n,count", sorted(FREE_TREE_COUNTS.items()))
    def test_counts(self, n, count):
        assert sum(1 for _ in enumerate_free_trees(n)) == count

    @pytest.mark.parametrize("n", range(1, 13))
    def test_pairwise_non_isomorphic(self, n):
        codes = [canonical_code(t) for t in enumerate_free_trees(n)]
        assert len(set(codes)) == len(codes)

    @pytest.mark.parametrize("n", range(1, 8))
    def test_labeled_oracle(self, n):
        expected = {canonical_code(t) for t in free_trees_from_labeled(n)}
        assert {canonical_code(t) for t in enumerate_free_trees(n)} == expected

    @pytest.mark.parametrize("n", range(1, 12))
    def test_extension_oracle(self, n):
        expected = {canonical_code(t) for t in free_trees_by_extension(n)}
        assert {canonical_code(t) for t in enumerate_free_trees(n)} == expected

    def test_cap(self):
        with pytest.raises(CapExceeded):
            enumerate_free_trees(30, cap=24)

    def test_partitions_disjoint_and_cover(self):
        stream = enumerate_free_trees(10)
        parts = [[canonical_code(t) for t in p] for p in stream.partitions(3)]
        flat = [c for p in parts for c in p]
        assert len(flat) == len(set(flat)) == 106

    def test_pickle(self):
        part = enumerate_free_trees(9).partitions(2)[1]
        back = pickle.loads(pickle.dumps(part))
        assert [t.edges for t in back] == [t.edges for t in part]


class TestKragujevac:
    @pytest.mark.parametrize("text,order", [
        ("B3:58,B3*:1", 415),
        ("B3:59", 414),
        ("B3:22,B2*:1", 161),
        ("B3:3", 22),
        ("B2", 6),
    ])
    def test_order(self, text, order):
        spec = KragujevacSpec.parse(text)
        assert spec.order == order
        assert make_kragujevac(spec).n == order

    @pytest.mark.parametrize("text", ["B3:5", "B3:4,B3*:1", "B4:2,B2:3", "B3:22,B2*:1", "B1:2,B5:1"])
    def test_closed_form_abc(self, text):
        spec = KragujevacSpec.parse(text)
        assert spec.abc() == pytest.approx(abc_index(make_kragujevac(spec).tree), abs=1e-12)

    def test_proper(self):
        assert KragujevacSpec.parse("B3:4").proper
        assert not KragujevacSpec.parse("B3:4,B3*:1").proper

    def test_empty(self):
        with pytest.raises(EmptySpec):
            KragujevacSpec([])

    def test_multiple_stars(self):
        with pytest.raises(MultipleStars):
            KragujevacSpec.parse("B3*:2")

    def test_classify_round_trip(self):
        spec = KragujevacSpec.parse("B4:2,B3:3,B2*:1")
        kinds = classify_branches(make_kragujevac(spec))
        assert KragujevacSpec(kinds) == spec

    def test_pendent_profile(self):
        spec = KragujevacSpec.parse("B3:4,B3*:1")
        lengths = sorted(p.length for p in pendent_paths(make_kragujevac(spec).tree))
        assert lengths == [2] * 14 + [3]

    def test_str_round_trip(self):
        spec = KragujevacSpec.parse("B3*,B3:2")
        assert str(spec) == "B3:2,B3*:1"
        assert KragujevacSpec.parse(str(spec)) == spec


class TestSplit:
    @pytest.mark.parametrize("left,right", [("B3:3", "B3:4"), ("B3:2,B3*:1", "B4:3"), ("B2", "B2")])
    def test_closed_form_abc(self, left, right):
        spec = SplitKragujevacSpec(KragujevacSpec.parse(left), KragujevacSpec.parse(right))
        rt = make_split_kragujevac(spec)
        assert rt.n == spec.order
        assert spec.abc() == pytest.approx(abc_index(rt.tree), abs=1e-12)
        root = rt.root
        (other,) = [w for w in rt.tree.neighbors(root) if branch_kind_at(rt.tree, root, w) is None]
        assert (rt.tree.degrees[root], rt.tree.degrees[other]) == spec.hub_degrees


class TestAttach:
    def test_attach_path(self):
        t = attach_pendent_path(Tree.star(3), 0, 3)
        assert t.n == 7
        assert sorted(p.length for p in pendent_paths(t)) == [1, 1, 1, 3]

    def test_make_branch_root(self):
        rt = make_kragujevac(KragujevacSpec([BranchKind(3)]))
        assert isinstance(rt, RootedTree) and rt.tree.degrees[0] == 1
