import itertools
import random

import pytest
from hypothesis import given, strategies as st

from cattables.errors import BoundaryMismatch, NotNatural
from cattables.random_instances import random_function, random_signature
from cattables.sets import FinFunction, FinSet, pair
from cattables.signatures import (Signature, SignatureMorphism, check_signature_adjunction,
                                  colimit_signatures, compose_signature_morphisms, counit, fiber_morphism,
                                  identity_signature_morphism, substitute_along, sum_along,
                                  transpose_signature, transpose_to_sum, typed_functions, unit)
from oracles import all_pairs_pullback, connected_classes, typed_maps


@st.composite
def adjunction_instances(draw):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = random.Random(seed)
    X1 = FinSet(f"x{j}" for j in range(rng.randint(1, 3)))
    X2 = FinSet(f"z{j}" for j in range(rng.randint(0, 3)))
    f = random_function(rng, X2, X1)
    return f, random_signature(rng, X2, rng.randint(0, 4), "b"), random_signature(rng, X1, rng.randint(0, 4), "a")


def test_signature_requires_sorts_to_cover_typing():
    with pytest.raises(BoundaryMismatch):
        Signature.of({"a": "str"}, ["int"])


def test_morphism_must_preserve_sorts():
    s = Signature.of({"a": "str", "b": "int"})
    with pytest.raises(NotNatural):
        fiber_morphism(s, s, {"a": "b", "b": "b"})


def test_sum_along_examples():
    sig = Signature.of({"name": "str"})
    assert sum_along(FinFunction.identity(sig.sorts), sig) == sig
    f = FinFunction(FinSet(["str"]), FinSet(["text"]), {"str": "text"})
    assert sum_along(f, sig).attributes() == {"name": "text"}


@given(adjunction_instances())
def test_sum_along_typing_is_pointwise_composite(inst):
    f, sig2, _ = inst
    summed = sum_along(f, sig2)
    assert summed.arity == sig2.arity
    assert all(summed.sort_of(i) == f(sig2.sort_of(i)) for i in sig2.arity)


def test_substitute_along_identity_is_isomorphic_with_invertible_counit():
    sig = Signature.of({"a": "str", "b": "int"})
    pulled, eps = substitute_along(FinFunction.identity(sig.sorts), sig)
    assert len(pulled.arity) == len(sig.arity)
    assert eps.arity_map.is_injective() and eps.arity_map.is_surjective()


def test_substitute_along_inclusion_keeps_matching_attributes():
    sig1 = Signature.of({"name": "str", "age": "int"})
    f = FinFunction.inclusion(FinSet(["str"]), sig1.sorts)
    pulled, eps = substitute_along(f, sig1)
    expected = {pair(i, x) for i, x in all_pairs_pullback(sig1.attributes(), f.as_dict())}
    assert set(pulled.arity) == expected == {pair("name", "str")}
    assert pulled.attributes() == {pair("name", "str"): "str"}
    assert eps(pair("name", "str")) == "name"


def test_substitute_along_empty_source_sorts():
    sig1 = Signature.of({"name": "str"})
    f = FinFunction(FinSet(), sig1.sorts, {})
    pulled, _ = substitute_along(f, sig1)
    assert len(pulled.arity) == 0


def test_transpose_of_identity_into_pullback_is_counit():
    sig1 = Signature.of({"a": "str", "b": "int"})
    f = FinFunction.identity(sig1.sorts)
    pulled, eps = substitute_along(f, sig1)
    assert transpose_to_sum(f, sig1, identity_signature_morphism(pulled)) == eps == counit(f, sig1)


@given(adjunction_instances())
def test_transpose_round_trips(inst):
    f, sig2, sig1 = inst
    summed = sum_along(f, sig2)
    for h in typed_functions(summed, sig1):
        m = fiber_morphism(summed, sig1, h)
        assert transpose_signature(f, transpose_signature(f, m, sig2), sig1) == m


def test_transpose_is_the_unique_mediator():
    rng = random.Random(3)
    for _ in range(30):
        X1 = FinSet(["x0", "x1"])
        X2 = FinSet(f"z{j}" for j in range(rng.randint(1, 3)))
        f = random_function(rng, X2, X1)
        sig1 = Signature.of({"only": rng.choice(X1.elements)}, X1)
        sig2 = random_signature(rng, X2, rng.randint(0, 3), "b")
        summed = sum_along(f, sig2)
        pulled, eps = substitute_along(f, sig1)
        for h in typed_functions(summed, sig1):
            m = fiber_morphism(summed, sig1, h)
            hits = [c for c in typed_maps(sig2.attributes(), pulled.attributes())
                    if all(eps(c[i]) == h(i) for i in sig2.arity)]
            assert len(hits) == 1
            assert hits[0] == transpose_signature(f, m, sig2).arity_map.as_dict()


@given(adjunction_instances())
def test_adjunction_and_triangle_identities(inst):
    f, sig2, sig1 = inst
    assert check_signature_adjunction(f, sig2, sig1)


def test_unit_pairs_each_attribute_with_its_sort():
    sig2 = Signature.of({"a": "z0"}, ["z0", "z1"])
    f = FinFunction(sig2.sorts, FinSet(["x"]), {"z0": "x", "z1": "x"})
    assert unit(f, sig2).arity_map.as_dict() == {"a": pair("a", "z0")}


# colimits ---------------------------------------------------------------------------------

def _span(apex_attrs, left_attrs, right_attrs, left_map, right_map, sorts):
    I = Signature.of(apex_attrs, sorts)
    I1, I2 = Signature.of(left_attrs, sorts), Signature.of(right_attrs, sorts)
    return ({"0": I, "1": I1, "2": I2},
            [("0", "1", fiber_morphism(I, I1, left_map)), ("0", "2", fiber_morphism(I, I2, right_map))])


def test_colimit_single_node_is_itself_with_identity_leg():
    sig = Signature.of({"a": "s", "b": "t"})
    apex, legs = colimit_signatures({"n": sig}, [])
    assert apex == sig and legs["n"] == identity_signature_morphism(sig)


def test_colimit_of_span_with_empty_apex_is_disjoint_union():
    nodes, edges = _span({}, {"a": "s"}, {"b": "s", "c": "t"}, {}, {}, ["s", "t"])
    apex, _ = colimit_signatures(nodes, edges)
    assert apex.attributes() == {"a": "s", "b": "s", "c": "t"}


def test_colimit_of_span_sharing_one_attribute():
    nodes, edges = _span({"k": "s"}, {"k": "s", "a": "t"}, {"k": "s", "b": "t"}, {"k": "k"}, {"k": "k"},
                         ["s", "t"])
    apex, legs = colimit_signatures(nodes, edges)
    assert len(apex.arity) == 2 + 2 - 1
    assert legs["1"]("k") == legs["2"]("k") == "k"


def test_colliding_names_are_qualified():
    nodes, edges = _span({}, {"a": "s"}, {"a": "s"}, {}, {}, ["s"])
    apex, legs = colimit_signatures(nodes, edges)
    assert set(apex.arity) == {"1.a", "2.a"}
    apex, _ = colimit_signatures(*_span({"k": "s"}, {"k": "s"}, {"k": "s"}, {"k": "k"}, {"k": "k"}, ["s"]),
                                 qualified=True)
    assert set(apex.arity) == {"0.k"}


def _random_span(rng):
    sorts = ["s", "t"]
    apex = {f"i{j}": rng.choice(sorts) for j in range(rng.randint(0, 2))}
    left = {f"l{j}": rng.choice(sorts) for j in range(rng.randint(0, 2))}
    right = {f"r{j}": rng.choice(sorts) for j in range(rng.randint(0, 2))}
    for a, x in apex.items():
        left.setdefault(f"l_{x}", x)
        right.setdefault(f"r_{x}", x)
    lm = {a: rng.choice([b for b, y in left.items() if y == x]) for a, x in apex.items()}
    rm = {a: rng.choice([b for b, y in right.items() if y == x]) for a, x in apex.items()}
    return _span(apex, left, right, lm, rm, sorts)


def test_colimit_classes_match_connected_components():
    rng = random.Random(11)
    for _ in range(100):
        nodes, edges = _random_span(rng)
        apex, legs = colimit_signatures(nodes, edges)
        members = [(n, i) for n in nodes for i in nodes[n].arity]
        pairs = [((a, i), (b, m(i))) for a, b, m in edges for i in m.source.arity]
        got = {frozenset((n, i) for n, i in members if legs[n](i) == c) for c in apex.arity}
        assert got == connected_classes(members, pairs)
        for a, b, m in edges:
            assert compose_signature_morphisms(m, legs[b]) == legs[a]


def test_colimit_universal_property_exhaustive():
    rng = random.Random(12)
    for _ in range(40):
        nodes, edges = _random_span(rng)
        apex, legs = colimit_signatures(nodes, edges)
        competitor = {"c0": "s", "c1": "s", "c2": "t"}
        per_node = {n: list(typed_maps(sig.attributes(), competitor)) for n, sig in nodes.items()}
        for combo in itertools.product(*per_node.values()):
            cocone = dict(zip(per_node, combo))
            if not all(cocone[b][m(i)] == cocone[a][i] for a, b, m in edges for i in m.source.arity):
                continue
            mediators = [u for u in typed_maps(apex.attributes(), competitor)
                         if all(u[legs[n](i)] == cocone[n][i] for n in nodes for i in nodes[n].arity)]
            assert len(mediators) == 1


def test_colimit_rejects_mismatched_edge():
    s, t = Signature.of({"a": "s"}), Signature.of({"b": "s"})
    with pytest.raises(BoundaryMismatch):
        colimit_signatures({"x": s, "y": t}, [("x", "y", fiber_morphism(t, s, {"b": "a"}))])


def test_sort_map_changing_edges_are_refused():
    s = Signature.of({"a": "s"}, ["s", "t"])
    flip = FinFunction(s.sorts, s.sorts, {"s": "s", "t": "s"})
    m = SignatureMorphism(s, s, FinFunction.identity(s.arity), flip)
    with pytest.raises(BoundaryMismatch):
        colimit_signatures({"x": s, "y": s}, [("x", "y", m)])
