import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from abcmin.errors import CapExceeded, NotRealizable
from abcmin.generators import KragujevacSpec, make_kragujevac
from abcmin.greedy import build_greedy, greedy_is_optimal, greedy_trace, realizations
from abcmin.reproduce import degree_sequences
from abcmin.tree import DegreeSequence, Tree, abc_index, canonical_code


@st.composite
def sequences(draw, max_internal=6):
    internal = draw(st.lists(st.integers(2, 6), min_size=0, max_size=max_internal))
    return DegreeSequence.from_internal(internal)


class TestBuild:
    def test_path(self):
        t = build_greedy([2, 2, 1, 1]).tree
        assert canonical_code(t) == canonical_code(Tree.path(4))

    def test_double_star_value(self):
        assert abc_index(build_greedy([3, 3, 1, 1, 1, 1]).tree) == pytest.approx(3.932653, abs=1e-6)

    def test_kragujevac_shape(self):
        spec = KragujevacSpec.parse("B3:5")
        ds = make_kragujevac(spec).tree.degree_sequence()
        rt = build_greedy(ds)
        assert canonical_code(rt.tree) == canonical_code(make_kragujevac(spec).tree)
        leaves = [v for v in range(rt.n) if rt.tree.degrees[v] == 1]
        assert {rt.level[v] for v in leaves} <= {1, 2}

    def test_single_vertex(self):
        assert build_greedy([0]).n == 1

    def test_unrealizable(self):
        with pytest.raises(NotRealizable):
            build_greedy([3, 3, 1, 1])

    @given(sequences())
    def test_degree_sequence_preserved(self, ds):
        assert build_greedy(ds).tree.degree_sequence() == ds

    @given(sequences())
    def test_deterministic(self, ds):
        a = build_greedy(ds).tree
        b = build_greedy(list(reversed(ds.values))).tree
        assert a == b

    @given(sequences())
    def test_bfs_degrees_non_increasing(self, ds):
        trace = greedy_trace(ds)
        degs = [d for _, d in trace.assignment]
        assert degs == sorted(degs, reverse=True)
        rt = trace.rooted
        # larger degrees never sit deeper than smaller ones
        for u, v in itertools.combinations(range(rt.n), 2):
            if rt.depth[u] < rt.depth[v]:
                assert rt.tree.degrees[u] >= rt.tree.degrees[v]


class TestOptimality:
    @pytest.mark.parametrize("max_len", [8])
    def test_small_sequences(self, max_len):
        for ds in degree_sequences(max_len):
            r = greedy_is_optimal(ds)
            assert r.optimal, (ds, r)

    def test_realization_count(self):
        # (3,3,2,1,1,1,1): the degree-2 vertex sits between the hubs or on a leg
        assert len(realizations([3, 3, 2, 1, 1, 1, 1], cap=10)) == 2

    def test_cap(self):
        with pytest.raises(CapExceeded):
            realizations([3, 3, 2, 2, 2, 1, 1, 1, 1], cap=1)
