import itertools
import random

import pytest
from hypothesis import given, strategies as st

from cattables.errors import IllegalTuple
from cattables.random_instances import random_domain, random_header_map, random_table
from cattables.relations import (Relation, check_galois, check_reflection, exists_along, forall_along,
                                 full_relation, image_of_table, include_relation, inverse_along,
                                 reflection_unit)
from cattables.signatures import Signature, fiber_morphism, identity_signature_morphism
from cattables.tables import (Table, TableMorphism, compose_table_morphisms, fiber_homs, fiber_table_morphism,
                              validate_table_morphism)
from cattables.tuples import SignedDomain, Tuple, tuple_set
from cattables.typedomains import TypeDomain

seeds = st.integers(0, 2 ** 32 - 1)
A = TypeDomain.of({"str": ["a", "b"], "int": ["1", "2"]})
WIDE = SignedDomain(Signature.of({"x": "str", "n": "int"}), A)
NARROW = SignedDomain(Signature.of({"x": "str"}, A.sorts), A)
DROP = fiber_morphism(NARROW.signature, WIDE.signature, {"x": "x"})


def rel(D, *rows):
    return Relation(D, rows)


def test_relation_rejects_illegal_members():
    with pytest.raises(IllegalTuple):
        rel(NARROW, {"x": "z"})


def test_exists_examples():
    R = rel(WIDE, {"x": "a", "n": "1"}, {"x": "a", "n": "2"})
    assert exists_along(identity_signature_morphism(WIDE.signature), R) == R
    assert exists_along(DROP, R) == rel(NARROW, {"x": "a"})
    assert len(exists_along(DROP, rel(WIDE))) == 0


@given(seeds)
def test_exists_is_set_image(seed):
    rng = random.Random(seed)
    members = [t for t in tuple_set(WIDE) if rng.random() < 0.5]
    assert exists_along(DROP, rel(WIDE, *members)).members == {Tuple({"x": t["x"]}) for t in members}


def test_inverse_examples():
    R = rel(NARROW, {"x": "b"})
    assert inverse_along(identity_signature_morphism(NARROW.signature), R) == R
    assert inverse_along(DROP, full_relation(NARROW)) == full_relation(WIDE)


@given(seeds)
def test_inverse_membership_is_pointwise(seed):
    rng = random.Random(seed)
    R = rel(NARROW, *[t for t in tuple_set(NARROW) if rng.random() < 0.5])
    pulled = inverse_along(DROP, R)
    for t in tuple_set(WIDE):
        assert (t in pulled) == (Tuple({"x": t["x"]}) in R)


def test_forall_examples():
    R = rel(NARROW, {"x": "a"})
    assert forall_along(identity_signature_morphism(NARROW.signature), R) == R
    assert forall_along(DROP, full_relation(WIDE)) == full_relation(NARROW)
    # x = a survives only when every n-extension is present
    assert forall_along(DROP, rel(WIDE, {"x": "a", "n": "1"})) == rel(NARROW)
    assert forall_along(DROP, rel(WIDE, {"x": "a", "n": "1"}, {"x": "a", "n": "2"})) == R


def test_galois_biconditionals_by_hand():
    big = list(tuple_set(WIDE))
    small = list(tuple_set(NARROW))
    for s_bits in itertools.product([0, 1], repeat=len(big)):
        S = rel(WIDE, *[t for t, b in zip(big, s_bits) if b])
        for r_bits in itertools.product([0, 1], repeat=len(small)):
            R = rel(NARROW, *[t for t, b in zip(small, r_bits) if b])
            assert exists_along(DROP, S).issubset(R) == S.issubset(inverse_along(DROP, R))
            assert inverse_along(DROP, R).issubset(S) == R.issubset(forall_along(DROP, S))


@given(seeds)
def test_galois_connections_on_random_maps(seed):
    rng = random.Random(seed)
    dom = random_domain(rng, rng.randint(1, 2), rng.randint(1, 3))
    h = random_header_map(rng, dom)
    if len(tuple_set(SignedDomain(h.target, dom))) > 12 or len(tuple_set(SignedDomain(h.source, dom))) > 12:
        return
    assert check_galois(h, dom)


def test_image_examples():
    T = Table.from_rows(NARROW, {"k1": {"x": "a"}, "k2": {"x": "b"}})
    assert len(image_of_table(T)) == len(T.keys)
    dup = Table.from_rows(NARROW, {"k1": {"x": "a"}, "k2": {"x": "a"}})
    assert image_of_table(dup) == rel(NARROW, {"x": "a"})


@given(seeds)
def test_image_is_set_of_rows(seed):
    rng = random.Random(seed)
    T = random_table(rng, WIDE, rng.randint(0, 6))
    assert image_of_table(T).members == set(T.rows.values())


def test_include_examples():
    assert len(include_relation(rel(NARROW))) == 0
    assert len(include_relation(rel(NARROW, {"x": "a"}, {"x": "b"}))) == 2


@given(seeds)
def test_image_after_include_is_identity(seed):
    rng = random.Random(seed)
    R = rel(WIDE, *[t for t in tuple_set(WIDE) if rng.random() < 0.5])
    assert image_of_table(include_relation(R)) == R


def test_unit_examples():
    T = Table.from_rows(NARROW, {"k1": {"x": "a"}, "k2": {"x": "b"}})
    eta = reflection_unit(T)
    assert eta.key_map.is_injective() and eta.key_map.is_surjective()
    const = Table.from_rows(NARROW, {"k1": {"x": "a"}, "k2": {"x": "a"}, "k3": {"x": "a"}})
    assert len(reflection_unit(const).key_map.image()) == 1


@given(seeds)
def test_unit_validates_and_is_natural(seed):
    rng = random.Random(seed)
    T = random_table(rng, WIDE, rng.randint(0, 5))
    eta = reflection_unit(T)
    assert validate_table_morphism(eta)
    # naturality against the projection onto NARROW
    S = Table.from_rows(NARROW, {f"j{n}": {"x": v} for n, v in enumerate(sorted({t["x"] for t in T.rows.values()}))})
    by_x = {S.rows[j]["x"]: j for j in S.keys}
    m = fiber_table_morphism(T, S, {"x": "x"}, {k: by_x[t["x"]] for k, t in T.rows.items()})
    eta_S = reflection_unit(S)
    img = eta_S.target
    im_m = fiber_table_morphism(eta.target, img, {"x": "x"},
                                {k: Tuple({"x": t["x"]}).key() for k, t in eta.target.rows.items()})
    assert compose_table_morphisms(m, eta_S) == compose_table_morphisms(eta, im_m)


def test_reflection_singletons_and_random():
    T = Table.from_rows(NARROW, {"k": {"x": "a"}})
    assert check_reflection([T], [rel(NARROW, {"x": "a"})])
    rng = random.Random(9)
    for _ in range(20):
        tables = [random_table(rng, NARROW, rng.randint(0, 4)) for _ in range(3)]
        relations = [rel(NARROW, *[t for t in tuple_set(NARROW) if rng.random() < 0.5]) for _ in range(3)]
        assert check_reflection(tables, relations)


def test_reflection_hom_counts_by_brute_force():
    rng = random.Random(10)
    for _ in range(20):
        T = random_table(rng, WIDE, rng.randint(0, 4))
        R = rel(WIDE, *[t for t in tuple_set(WIDE) if rng.random() < 0.5])
        # morphisms T → inc(R) correspond to morphisms im(T) → inc(R)
        assert len(fiber_homs(T, include_relation(R))) == len(fiber_homs(include_relation(image_of_table(T)),
                                                                         include_relation(R)))


def test_mutated_unit_is_rejected():
    T = Table.from_rows(NARROW, {"k1": {"x": "a"}, "k2": {"x": "b"}})
    R = rel(NARROW, {"x": "a"}, {"x": "b"})

    def stuck_unit(T_):
        # lands in a target with an extra unused row, so its key map is not onto
        real = reflection_unit(T_)
        extra = {**real.target.rows, "spare": Tuple({"x": "a"})}
        target = Table(real.target.domain, list(extra), extra, check=False)
        return TableMorphism(T_, target, real.dom_mor, real.key_map.as_dict())

    assert check_reflection([T], [R])
    assert not check_reflection([T], [R], unit=stuck_unit)


def test_relation_iteration_is_ordered():
    R = rel(NARROW, {"x": "b"}, {"x": "a"})
    assert [t["x"] for t in R] == ["a", "b"]
