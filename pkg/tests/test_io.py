import json
import random

import pytest
from hypothesis import given, strategies as st

from cattables.errors import IllegalTuple, ResolutionError
from cattables.io import (Workspace, domain_from_json, domain_to_json, dumps, load_ref, read_csv_rows,
                          relation_to_json, signature_from_json, signature_to_json, table_to_csv, table_to_json)
from cattables.random_instances import random_domain, random_signature, random_table
from cattables.relations import image_of_table
from cattables.tables import Table
from cattables.tuples import SignedDomain

seeds = st.integers(0, 2 ** 32 - 1)


def _random_table(seed):
    rng = random.Random(seed)
    dom = random_domain(rng, rng.randint(1, 3), rng.randint(1, 4), sort_prefix="x", value_prefix="y")
    sig = random_signature(rng, dom.sorts, rng.randint(0, 3))
    return random_table(rng, SignedDomain(sig, dom), rng.randint(0, 6))


@given(seed=seeds)
def test_json_round_trip(seed, tmp_path_factory):
    T = _random_table(seed)
    path = tmp_path_factory.mktemp("rt") / "t.json"
    path.write_text(dumps(table_to_json(T)), encoding="utf-8")
    kind, back, name = load_ref(str(path))
    assert kind == "tables" and name == "t" and back == T


@given(seed=seeds)
def test_csv_round_trip_with_sidecar_signature(seed, tmp_path_factory):
    T = _random_table(seed)
    T = Table(T.domain, [f"r{n}" for n in range(1, len(T.keys) + 1)],
              {f"r{n}": T.rows[k] for n, k in enumerate(T.keys, start=1)})
    if not T.signature.arity:
        return
    d = tmp_path_factory.mktemp("csv")
    (d / "t.csv").write_text(table_to_csv(T), encoding="utf-8")
    manifest = {"domains": {"dom": domain_to_json(T.domain.domain)},
                "signatures": {"sig": signature_to_json(T.signature)},
                "tables": {"t": {"signature": "sig", "domain": "dom", "csv": "t.csv"}}}
    (d / "m.json").write_text(dumps(manifest), encoding="utf-8")
    ws = Workspace.load(d / "m.json")
    back = ws.get("tables", "t")
    # keys are renumbered in file order, which is key order here
    assert [back.rows[k] for k in sorted(back.keys, key=lambda k: int(k[1:]))] == \
        [T.rows[k] for k in sorted(T.keys, key=lambda k: int(k[1:]))]
    assert back.domain == T.domain


def test_domain_and_signature_round_trip():
    T = _random_table(4)
    assert domain_from_json(json.loads(dumps(domain_to_json(T.domain.domain)))) == T.domain.domain
    assert signature_from_json(signature_to_json(T.signature)) == T.signature


def test_relation_json_lists_members_in_order():
    T = _random_table(5)
    obj = relation_to_json(image_of_table(T))
    assert obj["members"] == sorted(obj["members"], key=lambda m: json.dumps(m, sort_keys=True, separators=(",", ":")))
    assert len(obj["members"]) == len(set(T.rows.values()))


def test_dumps_is_deterministic():
    T = _random_table(6)
    assert dumps(table_to_json(T)) == dumps(table_to_json(T))


def _workspace(tmp_path, tables):
    manifest = {"domains": {"d": {"sorts": ["s"], "values": ["a", "b"], "classification": [["s", "a"]]}},
                "signatures": {"sig": {"sorts": ["s"], "attributes": {"x": "s"}}},
                "tables": tables}
    (tmp_path / "m.json").write_text(json.dumps(manifest), encoding="utf-8")
    return Workspace.load(tmp_path / "m.json")


def test_unresolved_reference_is_a_resolution_error(tmp_path):
    ws = _workspace(tmp_path, {"t": {"signature": "missing", "domain": "d", "rows": {}}})
    with pytest.raises(ResolutionError, match="missing"):
        ws.get("tables", "t")


def test_illegal_row_is_semantic(tmp_path):
    ws = _workspace(tmp_path, {"t": {"signature": "sig", "domain": "d", "rows": {"k": {"x": "b"}}}})
    with pytest.raises(IllegalTuple):
        ws.get("tables", "t")
    assert ws.get("tables", "t", check=False).rows["k"]["x"] == "b"


def test_self_reference_is_detected(tmp_path):
    ws = _workspace(tmp_path, {})
    ws.entries["tables"]["loop"] = {"signature": "sig", "domain": "d", "rows": {}}
    ws.entries["table_morphisms"]["m"] = {"source": "m", "target": "loop", "arity_map": {}, "key_map": {}}
    with pytest.raises(ResolutionError):
        ws.get("table_morphisms", "m")


def test_bad_csv_shape(tmp_path):
    (tmp_path / "bad.csv").write_text("x,y\n1\n", encoding="utf-8")
    with pytest.raises(ResolutionError, match="fields"):
        read_csv_rows(tmp_path / "bad.csv")


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(ResolutionError):
        load_ref(str(tmp_path / "nope.json"))
    (tmp_path / "bad.json").write_text("{", encoding="utf-8")
    with pytest.raises(ResolutionError):
        load_ref(str(tmp_path / "bad.json"))


def test_bundled_workspace_loads(fixtures_dir):
    ws = Workspace.load(fixtures_dir / "manifest.json")
    emp, dep = ws.get("tables", "employees"), ws.get("tables", "departments")
    assert len(emp.keys) == len(dep.keys) == 3
    assert set(dep.keys) == {"r1", "r2", "r3"}
    nodes, edges, dom = ws.get("diagrams", "staffing_of_departments")
    assert set(nodes) == {"employees", "staffed"} and len(edges) == 1 and dom is None
