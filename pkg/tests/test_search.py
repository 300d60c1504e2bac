import itertools
import math

import pytest

from abcmin import search
from abcmin.errors import NoComposition
from abcmin.generators import BranchKind, KragujevacSpec, enumerate_free_trees
from abcmin.search import (
    SearchReport,
    audit_structure,
    audit_tree,
    cache_load,
    cache_store,
    conjecture_check,
    exhaustive_min,
    family_candidates,
    family_min,
    parse_family_spec,
    spec_tree,
)
from abcmin.tree import Tree, abc_index, canonical_code

B2, B3, B2S, B3S = (BranchKind.parse(s) for s in ("B2", "B3", "B2*", "B3*"))


def brute_family_min(n, kinds, stars=()):
    """Smallest one-hub composition by plain loops over multiplicities."""
    best = math.inf
    plain = sorted(kinds, key=str)
    for star in [None, *stars]:
        rest = n - 1 - (star.order if star else 0)
        if rest < 0:
            continue
        ranges = [range(rest // k.order + 1) for k in plain]
        for mult in itertools.product(*ranges):
            if sum(m * k.order for m, k in zip(mult, plain)) != rest:
                continue
            branches = [k for m, k in zip(mult, plain) for _ in range(m)] + ([star] if star else [])
            if not branches:
                continue
            best = min(best, KragujevacSpec(branches).abc())
    return best


class TestExhaustive:
    @pytest.mark.parametrize("n", [4, 5, 6])
    def test_path_is_minimal(self, n):
        r = exhaustive_min(n)
        assert len(r.minima) == 1
        assert canonical_code(r.minima[0]) == canonical_code(Tree.path(n))
        assert r.min_abc == pytest.approx((n - 1) / math.sqrt(2), abs=1e-12)

    def test_n10(self):
        r = exhaustive_min(10)
        assert r.min_abc == pytest.approx(6.323520916159047, abs=1e-12)
        assert r.scanned == 106

    @pytest.mark.parametrize("n", [8, 11, 12])
    def test_brute_force_oracle(self, n):
        r = exhaustive_min(n)
        assert r.min_abc == min(abc_index(t) for t in enumerate_free_trees(n))

    def test_parallel_matches_serial(self):
        a, b = exhaustive_min(12, jobs=1), exhaustive_min(12, jobs=3)
        assert a.min_abc == b.min_abc
        assert [canonical_code(t) for t in a.minima] == [canonical_code(t) for t in b.minima]

    def test_report_round_trip(self):
        r = exhaustive_min(9)
        audit_structure(r)
        back = SearchReport.from_dict(r.to_dict())
        assert back.min_abc == r.min_abc
        assert [t.edges for t in back.trees()] == [t.edges for t in r.trees()]
        assert [a.name for a in back.audits] == [a.name for a in r.audits]


class TestAudits:
    @pytest.mark.parametrize("n", [10, 12, 14, 15])
    def test_clean_orders(self, n):
        r = exhaustive_min(n)
        audit_structure(r)
        assert r.ok, [a for a in r.audits if a.enforced and not a.passed]

    def test_n9_ties_reported(self):
        r = exhaustive_min(9)
        audit_structure(r)
        assert len(r.minima) == 4 and not r.ok
        failed = {a.name for a in r.audits if a.enforced and not a.passed}
        assert failed == {"pendent-paths-at-most-3", "at-most-one-p3"}

    @pytest.mark.parametrize("n", range(1, 16))
    def test_some_minimum_is_clean(self, n):
        r = exhaustive_min(n)
        clean = [t for t in r.minima
                 if all(a.passed or not a.enforced for a in audit_tree(t, n))]
        assert clean
        # anything that fails an audit ties with the path
        for t in r.minima:
            if t not in clean:
                assert abc_index(t) == pytest.approx((n - 1) / math.sqrt(2), abs=1e-12)

    def test_internal_edges_listed(self):
        t = spec_tree(KragujevacSpec.parse("B3:5"))
        (inner,) = [a for a in audit_tree(t) if a.name == "no-internal-paths"]
        assert inner.passed and len(inner.exceptions) == 5

    def test_long_pendent_path_witness(self):
        t = Tree(7, [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6)])
        (a,) = [a for a in audit_tree(t) if a.name == "pendent-paths-at-most-3"]
        assert not a.passed and a.witnesses == [[0, 3, 4, 5, 6]]


class TestFamily:
    @pytest.mark.parametrize("n", [22, 57, 99, 150, 161, 168, 200])
    def test_matches_brute_force(self, n):
        r = family_min(n, allow_p3=True)
        assert r.min_abc == pytest.approx(brute_family_min(n, [B2, B3], [B2S, B3S]), abs=1e-12)

    @pytest.mark.parametrize("n", [30, 90, 161])
    def test_specs_build_real_trees(self, n):
        r = family_min(n, allow_p3=True, max_hubs=2)
        for spec in r.minima:
            t = spec_tree(spec)
            assert t.n == n
            assert abc_index(t) == pytest.approx(r.min_abc, abs=1e-10)

    @pytest.mark.parametrize("n", [100, 250, 416])
    def test_monotone_in_branch_sets(self, n):
        small = family_min(n, allowed_branches=[B2, B3]).min_abc
        big = family_min(n, allowed_branches=[B2, B3, BranchKind(4)]).min_abc
        two = family_min(n, allowed_branches=[B2, B3, BranchKind(4)], max_hubs=2).min_abc
        assert big <= small + 1e-12 and two <= big + 1e-12

    def test_no_composition(self):
        with pytest.raises(NoComposition):
            family_min(422, allowed_branches=[B3])
        assert family_min(421, allowed_branches=[B3]).minima == [KragujevacSpec.parse("B3:60")]

    @pytest.mark.parametrize("n", [161, 168])
    def test_b2_at_special_orders(self, n):
        assert search.b2_in_family_min(n)

    def test_candidates_sorted(self):
        pts = family_candidates(300, allow_p3=True, max_hubs=2)
        assert [p.abc for p in pts] == sorted(p.abc for p in pts)

    def test_parse_family_spec(self):
        for text in ("B3:3,B2*:1", "[B3:2]-[B3:4]"):
            assert str(parse_family_spec(text)) == text


class TestConjecture:
    def test_with_p3_row_has_one_star(self):
        (row,) = conjecture_check([500])
        assert sum(b.star for b in row.with_p3.spec.branches) == 1
        assert not any(b.star for b in row.no_p3.spec.branches)

    def test_two_hubs_restore_order(self):
        rows = conjecture_check(range(416, 430), no_p3_hubs=2)
        assert all(r.no_p3_wins for r in rows)

    def test_as_row(self):
        (row,) = conjecture_check([430])
        d = row.as_row()
        assert d["winner"] in ("no-p3", "p3")
        assert d["gap"] == pytest.approx(d["no_p3_abc"] - d["p3_abc"])


class TestCache:
    def test_round_trip(self, tmp_path):
        r = family_min(161, allow_p3=True)
        audit_structure(r)
        cache_store(r, tmp_path)
        back = cache_load(161, r.scope, r.params, tmp_path)
        assert back is not None and back.provenance.startswith("cache:")
        assert back.min_abc == r.min_abc
        assert [str(s) for s in back.minima] == [str(s) for s in r.minima]

    def test_miss(self, tmp_path):
        assert cache_load(5, "exhaustive", {}, tmp_path) is None
        r = exhaustive_min(5)
        cache_store(r, tmp_path)
        assert cache_load(5, "exhaustive", {"cap": 1}, tmp_path) is None
