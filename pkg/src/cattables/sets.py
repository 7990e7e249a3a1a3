"""Finite sets of text tokens, total functions between them, and their
finite limits and colimits.

Composite elements are encoded as text so every construction stays inside
the same universe of tokens: pairs become ``⟨a,b⟩`` and tagged copies in a
disjoint union become ``k:a``.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from typing import Iterable, Iterator, Mapping, Sequence

from scipy.cluster.hierarchy import DisjointSet

from .errors import AmbiguousEncoding, BoundaryMismatch


def pair(*parts: str) -> str:
    return "⟨" + ",".join(parts) + "⟩"


def tag(index: int, element: str) -> str:
    return f"{index}:{element}"


class FinSet:
    """An immutable finite set of strings kept in sorted order."""

    __slots__ = ("elements", "_members")

    def __init__(self, elements: Iterable[str] = ()):
        members = frozenset(elements)
        for e in members:
            if not isinstance(e, str):
                raise TypeError(f"set elements must be str, got {e!r}")
        self._members = members
        self.elements = tuple(sorted(members))

    def __iter__(self) -> Iterator[str]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, item: object) -> bool:
        return item in self._members

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FinSet) and self._members == other._members

    def __hash__(self) -> int:
        return hash(self._members)

    def __repr__(self) -> str:
        return "FinSet({" + ", ".join(self.elements) + "})"

    def issubset(self, other: "FinSet") -> bool:
        return self._members <= other._members


class FinFunction:
    """A total function between two FinSets."""

    __slots__ = ("source", "target", "_map", "_hash")

    def __init__(self, source: FinSet, target: FinSet, assignment: Mapping[str, str]):
        if set(assignment) != set(source):
            missing = sorted(set(source) - set(assignment))
            extra = sorted(set(assignment) - set(source))
            raise BoundaryMismatch(
                f"assignment domain differs from source (missing {missing}, extra {extra})")
        for a, b in assignment.items():
            if b not in target:
                raise BoundaryMismatch(f"{a} is sent to {b}, which is not in the target")
        self.source = source
        self.target = target
        self._map = {a: assignment[a] for a in source}
        self._hash = None

    @classmethod
    def identity(cls, s: FinSet) -> "FinFunction":
        return cls(s, s, {a: a for a in s})

    @classmethod
    def inclusion(cls, sub: FinSet, s: FinSet) -> "FinFunction":
        return cls(sub, s, {a: a for a in sub})

    def __call__(self, a: str) -> str:
        return self._map[a]

    def items(self):
        return self._map.items()

    def as_dict(self) -> dict[str, str]:
        return dict(self._map)

    def image(self) -> FinSet:
        return FinSet(self._map.values())

    def fiber(self, b: str) -> list[str]:
        return [a for a, v in self._map.items() if v == b]

    def is_injective(self) -> bool:
        return len(set(self._map.values())) == len(self._map)

    def is_surjective(self) -> bool:
        return len(set(self._map.values())) == len(self.target)

    def then(self, g: "FinFunction") -> "FinFunction":
        return compose(self, g)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, FinFunction) and self.source == other.source
                and self.target == other.target and self._map == other._map)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.source, self.target, frozenset(self._map.items())))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{a}↦{b}" for a, b in self._map.items())
        return f"FinFunction({{{body}}})"


def compose(f: FinFunction, g: FinFunction) -> FinFunction:
    """First f, then g."""
    if f.target != g.source:
        raise BoundaryMismatch("cannot compose: target of the first is not the source of the second")
    return FinFunction(f.source, g.target, {a: g(f(a)) for a in f.source})


def _checked_names(names: Sequence[str], what: str) -> FinSet:
    s = FinSet(names)
    if len(s) != len(names):
        raise AmbiguousEncoding(f"{what}: composite names collide")
    return s


def pullback_set(f: FinFunction, g: FinFunction) -> tuple[FinSet, FinFunction, FinFunction]:
    """P = {⟨a,b⟩ | f(a) = g(b)} with its two projections."""
    if f.target != g.target:
        raise BoundaryMismatch("pullback needs a cospan with a common target")
    by_value = defaultdict(list)
    for b in g.source:
        by_value[g(b)].append(b)
    names, first, second = [], {}, {}
    for a in f.source:
        for b in by_value.get(f(a), ()):
            p = pair(a, b)
            names.append(p)
            first[p] = a
            second[p] = b
    P = _checked_names(names, "pullback")
    return P, FinFunction(P, f.source, first), FinFunction(P, g.source, second)


def coproduct_set(sets: Sequence[FinSet]) -> tuple[FinSet, list[FinFunction]]:
    """Tagged disjoint union ``k:element`` with its injections."""
    total = FinSet(tag(k, e) for k, s in enumerate(sets) for e in s)
    injections = [FinFunction(s, total, {e: tag(k, e) for e in s}) for k, s in enumerate(sets)]
    return total, injections


def quotient_classes(elements: Iterable[str], identify: Iterable[tuple[str, str]]) -> dict[str, str]:
    """Map each element to the least member of its class under the
    equivalence generated by the given pairs."""
    ds = DisjointSet(list(elements))
    for a, b in identify:
        ds.merge(a, b)
    rep = {}
    for cls in ds.subsets():
        least = min(cls)
        for e in cls:
            rep[e] = least
    return rep


def pushout_set(f: FinFunction, g: FinFunction) -> tuple[FinSet, FinFunction, FinFunction]:
    """Q = (A ⊔ B)/~ generated by f(c) ~ g(c), with its injections."""
    if f.source != g.source:
        raise BoundaryMismatch("pushout needs a span with a common source")
    total, (ia, ib) = coproduct_set([f.target, g.target])
    rep = quotient_classes(total, ((ia(f(c)), ib(g(c))) for c in f.source))
    Q = FinSet(rep.values())
    return (Q, FinFunction(f.target, Q, {a: rep[ia(a)] for a in f.target}),
            FinFunction(g.target, Q, {b: rep[ib(b)] for b in g.target}))


def coequalize_set(f: FinFunction, g: FinFunction) -> tuple[FinSet, FinFunction]:
    if f.source != g.source or f.target != g.target:
        raise BoundaryMismatch("coequalizer needs a parallel pair")
    rep = quotient_classes(f.target, ((f(c), g(c)) for c in f.source))
    Q = FinSet(rep.values())
    return Q, FinFunction(f.target, Q, rep)


def image_factorize(f: FinFunction) -> tuple[FinSet, FinFunction, FinFunction]:
    """f = e then m with e surjective onto the image and m the inclusion."""
    img = f.image()
    return img, FinFunction(f.source, img, f.as_dict()), FinFunction.inclusion(img, f.target)


def functions_between(a: FinSet, b: FinSet) -> Iterator[FinFunction]:
    """Every total function a → b, in lexicographic order."""
    for values in itertools.product(b.elements, repeat=len(a)):
        yield FinFunction(a, b, dict(zip(a.elements, values)))


def count_functions(a: FinSet, b: FinSet) -> int:
    return len(b) ** len(a)
