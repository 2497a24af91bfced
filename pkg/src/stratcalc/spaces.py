"""Finite topological spaces, finite posets, and continuity checking.

Points are opaque strings. Their lexicographic order is the canonical
total order used everywhere a tie must be broken (class representatives,
serialization order, DOT labels). Topologies are stored extensionally as
the full family of open sets; at the sizes this library targets that is
exact and cheap. Spaces with more than ``MAX_OPENS`` opens are refused.

All values here are immutable after construction and all operations are
pure, so everything is safe to use concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import InputError

MAX_OPENS = 1 << 16

Subset = frozenset


def _set_key(s: frozenset) -> tuple:
    return tuple(sorted(s))


def sorted_sets(sets: Iterable[frozenset]) -> list[frozenset]:
    """Canonical deterministic ordering: lexicographic by sorted membership."""
    return sorted(sets, key=_set_key)


@dataclass(frozen=True)
class FiniteSpace:
    """A finite set of points together with a topology on them.

    ``opens`` must contain the empty set and the full point set and be
    closed under pairwise union and intersection. Construction checks
    all of this and raises :class:`InputError` otherwise.
    """

    points: tuple[str, ...]
    opens: frozenset[frozenset[str]]

    def __post_init__(self):
        pts = frozenset(self.points)
        if len(pts) != len(self.points):
            raise InputError("duplicate point identifiers")
        object.__setattr__(self, "points", tuple(sorted(self.points)))
        if len(self.opens) > MAX_OPENS:
            raise InputError(
                f"topology has {len(self.opens)} opens; limit is {MAX_OPENS}"
            )
        for u in self.opens:
            if not u <= pts:
                raise InputError(f"open set {sorted(u)} contains unknown points")
        if frozenset() not in self.opens or pts not in self.opens:
            raise InputError("topology must contain the empty set and the full set")
        opens = self.opens
        for u in opens:
            for w in opens:
                if u | w not in opens:
                    raise InputError(
                        f"opens not closed under union: {sorted(u)} | {sorted(w)}"
                    )
                if u & w not in opens:
                    raise InputError(
                        f"opens not closed under intersection: {sorted(u)} & {sorted(w)}"
                    )

    @property
    def full(self) -> frozenset[str]:
        return frozenset(self.points)

    def is_open(self, s: Iterable[str]) -> bool:
        return frozenset(s) in self.opens

    def opens_sorted(self) -> list[frozenset[str]]:
        return sorted_sets(self.opens)

    def require_points(self, s: Iterable[str], what: str = "set") -> frozenset[str]:
        s = frozenset(s)
        unknown = s - self.full
        if unknown:
            raise InputError(f"{what} contains unknown points {sorted(unknown)}")
        return s


def generate_topology(points: Iterable[str], basis: Iterable[Iterable[str]]) -> FiniteSpace:
    """Smallest topology on ``points`` containing every basis member.

    The basis is treated as a subbasis: the family basis + {empty, full}
    is closed under pairwise union and intersection until a fixed point
    is reached.
    """
    points = tuple(sorted(set(points)))
    full = frozenset(points)
    family: set[frozenset[str]] = {frozenset(), full}
    queue: list[frozenset[str]] = []
    for b in basis:
        b = frozenset(b)
        if not b <= full:
            raise InputError(f"basis member {sorted(b)} contains unknown points")
        if b not in family:
            family.add(b)
            queue.append(b)
    while queue:
        s = queue.pop()
        fresh = []
        for u in family:
            a, b = s | u, s & u
            if a not in family:
                fresh.append(a)
            if b not in family:
                fresh.append(b)
        for f in fresh:
            if f not in family:
                family.add(f)
                queue.append(f)
                if len(family) > MAX_OPENS:
                    raise InputError(
                        f"generated topology exceeds {MAX_OPENS} opens"
                    )
    return FiniteSpace(points, frozenset(family))


def discrete_space(points: Iterable[str]) -> FiniteSpace:
    """All subsets open. Guarded to at most 16 points."""
    points = tuple(sorted(set(points)))
    if len(points) > 16:
        raise InputError("discrete space limited to 16 points")
    family = [frozenset()]
    for p in points:
        family += [s | {p} for s in family]
    return FiniteSpace(points, frozenset(family))


def indiscrete_space(points: Iterable[str]) -> FiniteSpace:
    points = tuple(sorted(set(points)))
    return FiniteSpace(points, frozenset({frozenset(), frozenset(points)}))


def spec_zmod(n: int) -> FiniteSpace:
    """Underlying space of the spectrum of the integers mod ``n``.

    The points are the distinct prime divisors of ``n`` (named ``p<prime>``)
    with the discrete topology; ``n = 1`` gives the empty space. The ring
    index 0 is rejected.
    """
    if not isinstance(n, int) or n < 1:
        raise InputError("spec_zmod requires a positive integer")
    primes = []
    m, d = n, 2
    while d * d <= m:
        if m % d == 0:
            primes.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        primes.append(m)
    return discrete_space(f"p{p}" for p in primes)


@dataclass(frozen=True)
class Poset:
    """A finite partial order, stored as the full reflexive relation.

    Construction verifies reflexivity, antisymmetry, and transitivity
    and raises :class:`InputError` naming the first failure.
    """

    elements: tuple[str, ...]
    leq: frozenset[tuple[str, str]]

    def __post_init__(self):
        els = frozenset(self.elements)
        if len(els) != len(self.elements):
            raise InputError("duplicate poset elements")
        object.__setattr__(self, "elements", tuple(sorted(self.elements)))
        for a, b in self.leq:
            if a not in els or b not in els:
                raise InputError(f"relation pair ({a}, {b}) has unknown elements")
        for a in els:
            if (a, a) not in self.leq:
                raise InputError(f"relation not reflexive at {a}")
        for a, b in self.leq:
            if a != b and (b, a) in self.leq:
                raise InputError(f"relation not antisymmetric on ({a}, {b})")
        for a, b in self.leq:
            for c, d in self.leq:
                if b == c and (a, d) not in self.leq:
                    raise InputError(
                        f"relation not transitive: ({a},{b}) and ({c},{d})"
                    )

    @classmethod
    def generate(cls, elements: Iterable[str], pairs: Iterable[tuple[str, str]]) -> "Poset":
        """Reflexive-transitive closure of generating pairs, then validation.

        A cycle among distinct elements surfaces as an antisymmetry error.
        """
        elements = tuple(sorted(set(elements)))
        rel = {(a, a) for a in elements}
        rel.update((a, b) for a, b in pairs)
        changed = True
        while changed:
            changed = False
            for a, b in list(rel):
                for c, d in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True
        return cls(elements, frozenset(rel))

    def le(self, a: str, b: str) -> bool:
        return (a, b) in self.leq

    def up_set(self, x: str) -> frozenset[str]:
        return frozenset(b for b in self.elements if self.le(x, b))

    def up_sets(self) -> list[frozenset[str]]:
        """Every up-closed subset, in canonical order.

        Computed as all unions of principal up-sets; the count can be
        exponential in an antichain, so callers bound the element count.
        """
        family: set[frozenset[str]] = {frozenset()}
        queue = []
        for x in self.elements:
            u = self.up_set(x)
            if u not in family:
                family.add(u)
                queue.append(u)
        while queue:
            s = queue.pop()
            fresh = []
            for u in family:
                a = s | u
                if a not in family:
                    fresh.append(a)
            for f in fresh:
                family.add(f)
                queue.append(f)
        return sorted_sets(family)

    def covers(self) -> list[tuple[str, str]]:
        """Hasse pairs (a, b): a < b with nothing strictly between."""
        strict = {(a, b) for a, b in self.leq if a != b}
        out = []
        for a, b in sorted(strict):
            if not any((a, m) in strict and (m, b) in strict for m in self.elements):
                out.append((a, b))
        return out

    def strict_pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset((a, b) for a, b in self.leq if a != b)

    def is_monotone(self, mapping: Mapping[str, str], target: "Poset") -> bool:
        return all(target.le(mapping[a], mapping[b]) for a, b in self.leq)

    def monotone_counterexample(self, mapping: Mapping[str, str], target: "Poset"):
        for a, b in sorted(self.leq):
            if not target.le(mapping[a], mapping[b]):
                return (a, b)
        return None


def alexandroff_from_poset(poset: Poset) -> FiniteSpace:
    """Topology whose opens are exactly the up-closed sets of the poset."""
    family = set(poset.up_sets())
    family.add(frozenset())
    family.add(frozenset(poset.elements))
    return FiniteSpace(poset.elements, frozenset(family))


def specialization_preorder(space: FiniteSpace) -> frozenset[tuple[str, str]]:
    """Pairs (x, y) such that every open containing x also contains y.

    For a finite space the opens are exactly the up-closed sets of this
    preorder, so it inverts :func:`alexandroff_from_poset`.
    """
    pairs = set()
    for x in space.points:
        for y in space.points:
            if all(y in u for u in space.opens if x in u):
                pairs.add((x, y))
    return frozenset(pairs)


def strict_partial_order(elements: Iterable[str], preorder: Iterable[tuple[str, str]]) -> Poset:
    """Partial order carved out of a preorder.

    x < y holds when x <= y but not y <= x; the reflexive closure of
    that strict relation is returned. Antisymmetry holds by construction
    and transitivity of the strict part is certified by Poset validation.
    """
    elements = tuple(sorted(set(elements)))
    pre = set(preorder)
    rel = {(a, a) for a in elements}
    for a, b in pre:
        if a != b and (b, a) not in pre:
            rel.add((a, b))
    return Poset(elements, frozenset(rel))


@dataclass(frozen=True)
class PointMap:
    """A total function between the point sets of two finite spaces."""

    domain: FiniteSpace
    codomain: FiniteSpace
    table: Mapping[str, str]

    def __post_init__(self):
        missing = set(self.domain.points) - set(self.table)
        if missing:
            raise InputError(f"map undefined on points {sorted(missing)}")
        extra = set(self.table) - set(self.domain.points)
        if extra:
            raise InputError(f"map defined on unknown points {sorted(extra)}")
        bad = {p for p in self.domain.points if self.table[p] not in self.codomain.full}
        if bad:
            raise InputError(f"map sends {sorted(bad)} outside the codomain")
        object.__setattr__(self, "table", dict(self.table))

    def __call__(self, p: str) -> str:
        return self.table[p]

    def preimage(self, s: Iterable[str]) -> frozenset[str]:
        s = frozenset(s)
        return frozenset(p for p in self.domain.points if self.table[p] in s)


def identity_map(space: FiniteSpace) -> PointMap:
    return PointMap(space, space, {p: p for p in space.points})


def compose_maps(late: PointMap, early: PointMap) -> PointMap:
    if set(early.codomain.points) != set(late.domain.points):
        raise InputError("composition mismatch: codomain and domain differ")
    return PointMap(
        early.domain, late.codomain, {p: late(early(p)) for p in early.domain.points}
    )


def continuity_counterexample(m: PointMap):
    """First codomain open whose preimage is not open, or None."""
    for u in sorted_sets(m.codomain.opens):
        pre = m.preimage(u)
        if pre not in m.domain.opens:
            return (u, pre)
    return None


def check_continuity(m: PointMap) -> bool:
    """True iff the preimage of every codomain open is a domain open."""
    return continuity_counterexample(m) is None
