"""Type domains (classifications of values by sorts) and infomorphisms."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import BoundaryMismatch, NotInfomorphism, UnknownSort, Verdict
from .sets import FinFunction, FinSet, compose, tag


@dataclass(frozen=True)
class TypeDomain:
    sorts: FinSet
    values: FinSet
    classification: frozenset

    def __post_init__(self):
        for x, y in self.classification:
            if x not in self.sorts:
                raise UnknownSort(f"classification mentions unknown sort {x}")
            if y not in self.values:
                raise BoundaryMismatch(f"classification mentions unknown value {y}")

    @classmethod
    def of(cls, extents: Mapping[str, Iterable[str]], values: Iterable[str] | None = None) -> "TypeDomain":
        """Build from sort → values; ``values`` may add unclassified values."""
        pairs = frozenset((x, y) for x, ys in extents.items() for y in ys)
        vals = FinSet({y for _, y in pairs} | set(values or ()))
        return cls(FinSet(extents), vals, pairs)

    @cached_property
    def _extents(self) -> dict[str, FinSet]:
        acc: dict[str, list[str]] = {x: [] for x in self.sorts}
        for x, y in self.classification:
            acc[x].append(y)
        return {x: FinSet(ys) for x, ys in acc.items()}

    def extent(self, x: str) -> FinSet:
        try:
            return self._extents[x]
        except KeyError:
            raise UnknownSort(f"unknown sort {x}") from None

    def satisfies(self, y: str, x: str) -> bool:
        return (x, y) in self.classification

    def __repr__(self) -> str:
        body = "; ".join(f"{x}: {list(self.extent(x))}" for x in self.sorts)
        return f"TypeDomain({body})"


def extent(dom: TypeDomain, x: str) -> FinSet:
    return dom.extent(x)


def _infomorphism_verdict(source: TypeDomain, target: TypeDomain,
                          f: FinFunction, g: FinFunction) -> Verdict:
    for x2 in source.sorts:
        fx = f(x2)
        for y1 in target.values:
            lhs = source.satisfies(g(y1), x2)
            rhs = target.satisfies(y1, fx)
            if lhs != rhs:
                return Verdict.reject((x2, y1), f"{g(y1)} ⊨ {x2} is {lhs} but {y1} ⊨ {fx} is {rhs}")
    return Verdict.accept()


class Infomorphism:
    """⟨f, g⟩ from A₂ to A₁: sorts forward (f: X₂→X₁), values backward
    (g: Y₁→Y₂), with g(y₁) ⊨₂ x₂ iff y₁ ⊨₁ f(x₂)."""

    __slots__ = ("source", "target", "sort_map", "value_map")

    def __init__(self, source: TypeDomain, target: TypeDomain, sort_map: FinFunction,
                 value_map: FinFunction, check: bool = True):
        if sort_map.source != source.sorts or sort_map.target != target.sorts:
            raise BoundaryMismatch("sort map must run from source sorts to target sorts")
        if value_map.source != target.values or value_map.target != source.values:
            raise BoundaryMismatch("value map must run from target values to source values")
        self.source = source
        self.target = target
        self.sort_map = sort_map
        self.value_map = value_map
        if check:
            v = _infomorphism_verdict(source, target, sort_map, value_map)
            if not v:
                raise NotInfomorphism(v.detail)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Infomorphism) and self.source == other.source
                and self.target == other.target and self.sort_map == other.sort_map
                and self.value_map == other.value_map)

    def __hash__(self) -> int:
        return hash((self.sort_map, self.value_map))

    def __repr__(self) -> str:
        return f"Infomorphism({self.sort_map!r}, {self.value_map!r})"


def validate_infomorphism(m: Infomorphism) -> Verdict:
    return _infomorphism_verdict(m.source, m.target, m.sort_map, m.value_map)


def identity_infomorphism(dom: TypeDomain) -> Infomorphism:
    return Infomorphism(dom, dom, FinFunction.identity(dom.sorts), FinFunction.identity(dom.values))


def compose_infomorphisms(m1: Infomorphism, m2: Infomorphism) -> Infomorphism:
    """First m1: A₃→A₂, then m2: A₂→A₁."""
    if m1.target != m2.source:
        raise BoundaryMismatch("infomorphisms are not composable")
    return Infomorphism(m1.source, m2.target, compose(m1.sort_map, m2.sort_map),
                        compose(m2.value_map, m1.value_map))


def inverse_image_domain(f: FinFunction, dom: TypeDomain) -> TypeDomain:
    """Classify dom's values by f's source: y ⊨ x₂ iff y ⊨ f(x₂)."""
    if f.target != dom.sorts:
        raise BoundaryMismatch("sort map must land in the domain's sorts")
    pairs = frozenset((x2, y) for x2 in f.source for y in dom.extent(f(x2)))
    return TypeDomain(f.source, dom.values, pairs)


def inverse_image_infomorphism(f: FinFunction, dom: TypeDomain) -> Infomorphism:
    """The canonical ⟨f, id⟩ from f⁻¹(dom) to dom."""
    return Infomorphism(inverse_image_domain(f, dom), dom, f, FinFunction.identity(dom.values))


def classify_tuple(dom: TypeDomain, sig, t: Mapping[str, str]) -> bool:
    if sig.sorts != dom.sorts:
        raise BoundaryMismatch("signature and domain are over different sorts")
    if len(t) != len(sig.arity):
        return False
    for i in sig.arity:
        if i not in t or not dom.satisfies(t[i], sig.sort_of(i)):
            return False
    return True


def product_domains(doms: Sequence[TypeDomain], sorts: FinSet | None = None
                    ) -> tuple[TypeDomain, list[Infomorphism]]:
    """Product over a shared sort set: values are tagged ``k:value`` and
    each sort's extent is the tagged union of the operands' extents.

    Returns the product and its projections, whose value maps are the tag
    injections. The empty product needs ``sorts`` and has no values.
    """
    if sorts is None:
        if not doms:
            raise BoundaryMismatch("an empty product needs an explicit sort set")
        sorts = doms[0].sorts
    for d in doms:
        if d.sorts != sorts:
            raise BoundaryMismatch("product operands must share their sort set")
    values = FinSet(tag(k, y) for k, d in enumerate(doms) for y in d.values)
    pairs = frozenset((x, tag(k, y)) for k, d in enumerate(doms) for x, y in d.classification)
    prod = TypeDomain(sorts, values, pairs)
    ident = FinFunction.identity(sorts)
    projections = [Infomorphism(prod, d, ident, FinFunction(d.values, values, {y: tag(k, y) for y in d.values}))
                   for k, d in enumerate(doms)]
    return prod, projections
