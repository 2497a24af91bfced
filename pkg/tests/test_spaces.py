"""Finite spaces, posets, and continuity."""

from itertools import chain, combinations
from random import Random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratcalc import (
    InputError,
    PointMap,
    Poset,
    alexandroff_from_poset,
    check_continuity,
    discrete_space,
    generate_topology,
    indiscrete_space,
    spec_zmod,
    specialization_preorder,
)
from stratcalc.selftest import suite_spaces


def powerset(items):
    items = list(items)
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


def subbasis_normal_form(points, basis):
    """Oracle: opens are exactly the unions of finite intersections of
    basis members, plus the empty and full sets."""
    full = frozenset(points)
    intersections = {full}
    for picks in powerset(basis):
        if picks:
            inter = full
            for b in picks:
                inter = inter & frozenset(b)
            intersections.add(inter)
    opens = set()
    for picks in powerset(sorted(intersections, key=sorted)):
        union = frozenset()
        for s in picks:
            union = union | s
        opens.add(union)
    opens.add(frozenset())
    opens.add(full)
    return opens


class TestGenerateTopology:
    def test_single_generator(self):
        space = generate_topology(["a", "b"], [{"a"}])
        assert space.opens == {frozenset(), frozenset("a"), frozenset("ab")}

    def test_three_overlapping_intervals(self):
        points = ["a", "b", "c", "d"]
        basis = [{"a", "b"}, {"b", "c"}, {"c", "d"}]
        space = generate_topology(points, basis)
        expected = subbasis_normal_form(points, basis)
        assert space.opens == expected
        # frozen value of the oracle: nine opens in total
        assert sorted(map(sorted, space.opens)) == [
            [],
            ["a", "b"],
            ["a", "b", "c"],
            ["a", "b", "c", "d"],
            ["b"],
            ["b", "c"],
            ["b", "c", "d"],
            ["c"],
            ["c", "d"],
        ]

    def test_empty_basis_on_singleton(self):
        space = generate_topology(["a"], [])
        assert space.opens == {frozenset(), frozenset("a")}

    def test_unknown_point_rejected(self):
        with pytest.raises(InputError):
            generate_topology(["a"], [{"a", "z"}])

    @given(
        st.integers(min_value=1, max_value=6).flatmap(
            lambda n: st.tuples(
                st.just(n),
                st.lists(
                    st.sets(st.sampled_from("abcdef"[:n]), min_size=1),
                    max_size=4,
                ),
            )
        )
    )
    @settings(max_examples=60, deadline=None)
    def test_matches_normal_form_oracle(self, case):
        n, basis = case
        points = list("abcdef"[:n])
        space = generate_topology(points, basis)
        assert space.opens == subbasis_normal_form(points, basis)

    @given(
        st.lists(st.sets(st.sampled_from("abcde"), min_size=1), max_size=4)
    )
    @settings(max_examples=60, deadline=None)
    def test_idempotent(self, basis):
        space = generate_topology("abcde", basis)
        again = generate_topology(space.points, space.opens)
        assert again.opens == space.opens


class TestSpecZmod:
    def test_twelve(self):
        import sympy

        space = spec_zmod(12)
        oracle = sorted(f"p{p}" for p in sympy.primefactors(12))
        assert list(space.points) == oracle == ["p2", "p3"]
        assert len(space.opens) == 4  # discrete on two points

    def test_prime(self):
        space = spec_zmod(7)
        assert space.points == ("p7",)

    def test_one_gives_empty_space(self):
        space = spec_zmod(1)
        assert space.points == ()
        assert space.opens == {frozenset()}

    def test_zero_rejected(self):
        with pytest.raises(InputError):
            spec_zmod(0)


class TestAlexandroff:
    def brute_force_up_sets(self, poset):
        out = set()
        for subset in powerset(poset.elements):
            subset = frozenset(subset)
            if all(
                y in subset
                for x in subset
                for y in poset.elements
                if poset.le(x, y)
            ):
                out.add(subset)
        return out

    def test_chain(self):
        poset = Poset.generate(["a", "b"], [("a", "b")])
        space = alexandroff_from_poset(poset)
        assert space.opens == self.brute_force_up_sets(poset)
        assert space.opens == {frozenset(), frozenset("b"), frozenset("ab")}

    def test_antichain(self):
        poset = Poset.generate(["a", "b"], [])
        space = alexandroff_from_poset(poset)
        assert len(space.opens) == 4

    def test_two_disjoint_chains(self):
        poset = Poset.generate("abcd", [("a", "b"), ("d", "c")])
        space = alexandroff_from_poset(poset)
        assert space.opens == self.brute_force_up_sets(poset)
        assert len(space.opens) == 9

    def test_cycle_rejected(self):
        with pytest.raises(InputError):
            Poset.generate(["a", "b"], [("a", "b"), ("b", "a")])

    def test_missing_transitivity_rejected(self):
        rel = {("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")}
        with pytest.raises(InputError):
            Poset(("a", "b", "c"), frozenset(rel))

    def test_specialization_recovers_order(self):
        poset = Poset.generate("abcd", [("a", "b"), ("b", "c")])
        assert specialization_preorder(alexandroff_from_poset(poset)) == poset.leq


class TestContinuity:
    def test_identity_continuous(self):
        space = generate_topology("abc", [{"a"}, {"b", "c"}])
        assert check_continuity(PointMap(space, space, {p: p for p in "abc"}))

    def test_constant_continuous(self):
        dom = discrete_space("ab")
        cod = generate_topology("xy", [{"x"}])
        assert check_continuity(PointMap(dom, cod, {"a": "x", "b": "x"}))

    def test_indiscrete_to_discrete_fails(self):
        dom = indiscrete_space("ab")
        cod = discrete_space("ab")
        m = PointMap(dom, cod, {"a": "a", "b": "b"})
        # direct preimage enumeration: {a} is open in the codomain but its
        # preimage {a} is not open in the indiscrete domain
        assert frozenset("a") in cod.opens
        assert frozenset("a") not in dom.opens
        assert not check_continuity(m)

    def test_map_validation(self):
        dom = discrete_space("ab")
        cod = discrete_space("xy")
        with pytest.raises(InputError):
            PointMap(dom, cod, {"a": "x"})
        with pytest.raises(InputError):
            PointMap(dom, cod, {"a": "x", "b": "z"})


def test_space_invariant_violations_rejected():
    with pytest.raises(InputError):
        # missing full set
        from stratcalc import FiniteSpace

        FiniteSpace(("a", "b"), frozenset({frozenset()}))
    with pytest.raises(InputError):
        from stratcalc import FiniteSpace

        # not closed under union
        FiniteSpace(
            ("a", "b", "c"),
            frozenset(
                {
                    frozenset(),
                    frozenset("a"),
                    frozenset("b"),
                    frozenset("abc"),
                }
            ),
        )


def test_random_suite():
    assert suite_spaces(Random("pytest-spaces"), 25) == 25
