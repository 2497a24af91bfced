"""Refinement of covers and the cover-independent limit poset."""

from random import Random

import pytest

from stratcalc import (
    Cover,
    InputError,
    RefinementPair,
    alexandroff_from_poset,
    coarsening_from_refined,
    coarsening_surjection,
    discrete_space,
    is_refinement,
    maximal_cover,
    refined_poset,
    representative_section,
    spec_zmod,
)
from stratcalc.refine import RefinementPair
from stratcalc.selftest import suite_refine
from stratcalc.spaces import Poset
from stratcalc.stratify import quotient_poset


def w_space():
    return discrete_space("abcd")


U1, U2, U3 = frozenset("ab"), frozenset("bc"), frozenset("cd")


class TestIsRefinement:
    def test_superset_refines(self):
        space = w_space()
        coarse = Cover(space, (U1, U2, U3))
        fine = Cover(space, (U1, U2, U3, frozenset("b")))
        assert is_refinement(coarse, fine)

    def test_reflexive(self):
        cover = Cover(w_space(), (U1, U2, U3))
        assert is_refinement(cover, cover)

    def test_missing_member(self):
        space = w_space()
        left = Cover(space, (U1, U2, space.full))
        right = Cover(space, (U1, U3, space.full))
        assert not is_refinement(left, right)

    def test_different_spaces_rejected(self):
        a = discrete_space("ab")
        b = discrete_space("abc")
        with pytest.raises(InputError):
            is_refinement(Cover(a, (a.full,)), Cover(b, (b.full,)))


class TestCoarseningSurjection:
    def test_split_class(self):
        space = w_space()
        pair = RefinementPair(
            Cover(space, (space.full,)),
            Cover(space, (space.full, frozenset("b"))),
        )
        cm = coarsening_surjection(pair)
        fine_classes = {c.representative: c.members for c in cm.source.classes}
        assert fine_classes == {"a": frozenset("acd"), "b": frozenset("b")}
        assert cm("a") == "a" and cm("b") == "a"
        assert cm.monotone and cm.surjective

    def test_equal_covers_identity(self):
        space = w_space()
        cover = Cover(space, (U1, U2, U3))
        cm = coarsening_surjection(RefinementPair(cover, cover))
        assert all(cm(c.representative) == c.representative for c in cm.source.classes)

    def test_already_separated_bijection(self):
        space = w_space()
        pair = RefinementPair(
            Cover(space, (U1, U2, U3)),
            Cover(space, (U1, U2, U3, frozenset("a"))),
        )
        cm = coarsening_surjection(pair)
        images = [cm(c.representative) for c in cm.source.classes]
        assert sorted(images) == ["a", "b", "c", "d"]
        assert len(set(images)) == len(images)


class TestRepresentativeSection:
    def test_split_class_section(self):
        space = w_space()
        pair = RefinementPair(
            Cover(space, (space.full,)),
            Cover(space, (space.full, frozenset("b"))),
        )
        report = representative_section(pair)
        # the unique coarse class has representative a, which lands in the
        # fine class {a, c, d} whose representative is also a
        assert report.section.mapping == {"a": "a"}
        assert report.retracts
        assert report.injective

    def test_equal_covers(self):
        space = w_space()
        cover = Cover(space, (U1, U2, U3))
        report = representative_section(RefinementPair(cover, cover))
        assert report.injective and report.monotone and report.retracts

    def test_separating_refinement_inverse(self):
        # adding the member {a} keeps the classes but drops the relation
        # a < b: the fine signatures {0,3} and {0,1} are incomparable, so
        # the section is the inverse bijection yet fails monotonicity,
        # which is exactly why it is reported instead of required
        space = w_space()
        pair = RefinementPair(
            Cover(space, (U1, U2, U3)),
            Cover(space, (U1, U2, U3, frozenset("a"))),
        )
        fine_q = quotient_poset(space, pair.fine)
        assert sorted(fine_q.poset.strict_pairs()) == [("d", "c")]
        report = representative_section(pair)
        cm = coarsening_surjection(pair)
        assert report.injective
        assert not report.monotone
        assert cm.monotone  # the surjection direction never loses order
        for coarse, fine in report.section.mapping.items():
            assert cm(fine) == coarse


class TestRefinedPoset:
    def test_discrete_running_example(self):
        space = w_space()
        cover = maximal_cover(space)
        assert len(cover.members) == 15  # all nonempty subsets
        q = refined_poset(space)
        assert [c.representative for c in q.classes] == ["a", "b", "c", "d"]
        assert q.poset.strict_pairs() == frozenset()

    def test_one_point_space(self):
        q = refined_poset(discrete_space("a"))
        assert len(q.classes) == 1

    def test_chain_space(self):
        space = alexandroff_from_poset(Poset.generate("ab", [("a", "b")]))
        # opens: {}, {b}, {a, b}; maximal cover in canonical order
        cover = maximal_cover(space)
        assert [sorted(m) for m in cover.members] == [["a", "b"], ["b"]]
        h_a = frozenset(
            i for i, m in enumerate(cover.members) if "a" in m
        )
        h_b = frozenset(
            i for i, m in enumerate(cover.members) if "b" in m
        )
        assert h_a == {0} and h_b == {0, 1}
        q = refined_poset(space)
        assert sorted(q.poset.strict_pairs()) == [("a", "b")]

    def test_empty_space_rejected(self):
        with pytest.raises(InputError):
            refined_poset(spec_zmod(1))

    def test_terminality_onto_sampled_cover(self):
        space = w_space()
        cover = Cover(space, (U1, U2, U3))
        cm = coarsening_from_refined(space, cover)
        assert cm.surjective and cm.monotone
        assert cm.target.classes == quotient_poset(space, cover).classes


def test_random_suite():
    assert suite_refine(Random("pytest-refine"), 30) == 30
