import json
import subprocess
import sys
from pathlib import Path

import pytest

from cattables.cli import main

GOLDEN = Path(__file__).parent / "golden"

DOMAIN = {"sorts": ["s", "t"], "values": ["a", "b", "c"],
          "classification": [["s", "a"], ["s", "b"], ["t", "c"]]}


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write_manifest(tmp_path, **sections):
    base = {"domains": {"d": DOMAIN}}
    base.update(sections)
    path = tmp_path / "m.json"
    path.write_text(json.dumps(base), encoding="utf-8")
    return path


def table(attrs, rows):
    return {"signature": {"sorts": ["s", "t"], "attributes": attrs}, "domain": "d", "rows": rows}


def test_validate_bundled_fixtures(capsys, fixtures_dir):
    code, out, _ = run(capsys, "validate", fixtures_dir / "manifest.json")
    assert code == 0
    assert "ok tables employees" in out and "ok table_morphisms staffing" in out
    assert "invalid" not in out


def test_validate_reports_key_and_attribute(capsys, tmp_path):
    m = write_manifest(tmp_path, tables={"bad": table({"x": "s"}, {"k1": {"x": "a"}, "k2": {"x": "c"}})})
    code, out, _ = run(capsys, "validate", m)
    assert code == 1
    line = next(l for l in out.splitlines() if l.startswith("invalid"))
    assert "bad" in line and "key k2" in line and "attribute x" in line


def test_validate_broken_naturality(capsys, tmp_path):
    m = write_manifest(tmp_path, tables={"src": table({"x": "s"}, {"k": {"x": "a"}}),
                                         "tgt": table({"x": "s"}, {"j": {"x": "b"}})},
                       table_morphisms={"f": {"source": "src", "target": "tgt",
                                              "arity_map": {"x": "x"}, "key_map": {"k": "j"}}})
    code, out, _ = run(capsys, "validate", m)
    assert code == 1 and "invalid table_morphisms f" in out


def test_missing_reference_exits_2(capsys, tmp_path):
    m = write_manifest(tmp_path, tables={"t": {"signature": "nowhere", "domain": "d", "rows": {}}})
    code, _, err = run(capsys, "validate", m)
    assert code == 2 and "nowhere" in err
    code, _, _ = run(capsys, "image", tmp_path / "absent.json")
    assert code == 2


def test_join_matches_golden(capsys, fixtures_dir):
    manifest = fixtures_dir / "manifest.json"
    code, out, err = run(capsys, "join", f"{manifest}:employees", f"{manifest}:departments")
    assert code == 0
    assert out == (GOLDEN / "fixture_join.json").read_text(encoding="utf-8")
    assert "dept <- employees.dept = departments.dept (identified)" in err.splitlines()
    code, out, _ = run(capsys, "join", f"{manifest}:employees", f"{manifest}:departments",
                       "--format", "csv", "--fresh-keys")
    assert code == 0 and out == (GOLDEN / "fixture_join.csv").read_text(encoding="utf-8")


def test_join_is_deterministic(capsys, fixtures_dir):
    ref = fixtures_dir / "manifest.json"
    outs = {run(capsys, "join", f"{ref}:employees", f"{ref}:departments")[1] for _ in range(3)}
    assert len(outs) == 1


def test_join_sort_clash_exits_1(capsys, tmp_path):
    m = write_manifest(tmp_path, tables={"p": table({"x": "s"}, {"k": {"x": "a"}}),
                                         "q": table({"x": "t"}, {"j": {"x": "c"}})})
    code, _, err = run(capsys, "join", f"{m}:p", f"{m}:q")
    assert code == 1 and "x" in err


def test_join_of_disjoint_headers_is_a_product(capsys, tmp_path):
    m = write_manifest(tmp_path, tables={"p": table({"x": "s"}, {"k1": {"x": "a"}, "k2": {"x": "b"}}),
                                         "q": table({"y": "t"}, {"j1": {"y": "c"}, "j2": {"y": "c"},
                                                                 "j3": {"y": "c"}})})
    code, out, _ = run(capsys, "join", f"{m}:p", f"{m}:q")
    assert code == 0 and len(json.loads(out)["rows"]) == 6


def test_union_and_qualified_names(capsys, tmp_path):
    m = write_manifest(tmp_path, tables={"p": table({"x": "s"}, {"k": {"x": "a"}}),
                                         "q": table({"x": "s"}, {"k": {"x": "a"}, "j": {"x": "b"}})})
    code, out, _ = run(capsys, "union", f"{m}:p", f"{m}:q")
    assert code == 0 and len(json.loads(out)["rows"]) == 3
    code, out, _ = run(capsys, "join", f"{m}:p", f"{m}:q", "--qualified")
    assert code == 0 and json.loads(out)["signature"]["attributes"]


def test_image_drops_duplicates_and_include_keeps_members(capsys, tmp_path):
    m = write_manifest(tmp_path, tables={"dup": table({"x": "s"}, {"k1": {"x": "a"}, "k2": {"x": "a"},
                                                                   "k3": {"x": "b"}})})
    code, out, _ = run(capsys, "image", f"{m}:dup")
    assert code == 0
    rel = json.loads(out)
    assert len(rel["members"]) == 2
    rel_path = tmp_path / "rel.json"
    rel_path.write_text(out, encoding="utf-8")
    code, out, _ = run(capsys, "include", rel_path)
    assert code == 0 and len(json.loads(out)["rows"]) == 2


def test_enumerate_empty_header_has_one_tuple(capsys, tmp_path):
    m = write_manifest(tmp_path, signatures={"empty": {"sorts": ["s", "t"], "attributes": {}},
                                             "two": {"sorts": ["s", "t"], "attributes": {"x": "s", "y": "t"}}})
    code, out, _ = run(capsys, "enumerate", f"{m}:empty", "--domain", f"{m}:d")
    assert code == 0 and json.loads(out)["members"] == [{}]
    code, out, _ = run(capsys, "enumerate", f"{m}:two", "--domain", f"{m}:d")
    assert code == 0 and len(json.loads(out)["members"]) == 2
    code, _, _ = run(capsys, "enumerate", f"{m}:two")
    assert code == 2


def test_cap_exceeded_exits_1(capsys, tmp_path):
    m = write_manifest(tmp_path, signatures={"wide": {"sorts": ["s", "t"],
                                                      "attributes": {f"x{j}": "s" for j in range(4)}}})
    code, _, err = run(capsys, "enumerate", f"{m}:wide", "--domain", f"{m}:d", "--max-tuples", "10")
    assert code == 1 and "10" in err


def test_substitute_and_sigma(capsys, tmp_path):
    header = {"signature": {"sorts": ["s", "t"], "attributes": {"x": "s"}}, "domain": "d"}
    wide = {"signature": {"sorts": ["s", "t"], "attributes": {"x": "s", "z": "s"}}, "domain": "d"}
    m = write_manifest(tmp_path, tables={"p": table({"x": "s"}, {"k": {"x": "a"}}),
                                         "w": table({"x": "s", "z": "s"}, {"i": {"x": "a", "z": "a"},
                                                                           "j": {"x": "a", "z": "b"}})},
                       morphisms={"copy": {"source": wide, "target": header, "arity_map": {"x": "x", "z": "x"}},
                                  "clash": {"source": {**wide, "signature": {"sorts": ["s", "t"],
                                                                            "attributes": {"x": "s", "z": "t"}}},
                                            "target": header, "arity_map": {"x": "x", "z": "x"}}})
    code, out, _ = run(capsys, "sigma", f"{m}:p", "--morphism", f"{m}:copy")
    assert code == 0 and json.loads(out)["rows"] == {"k": {"x": "a", "z": "a"}}
    # only the diagonal row of w comes from a tuple over the narrow header
    code, out, _ = run(capsys, "substitute", f"{m}:w", "--morphism", f"{m}:copy", "--fresh-keys")
    assert code == 0 and json.loads(out)["rows"] == {"r1": {"x": "a"}}
    code, _, _ = run(capsys, "substitute", f"{m}:p", "--morphism", f"{m}:copy")
    assert code == 1
    code, _, _ = run(capsys, "sigma", f"{m}:p", "--morphism", f"{m}:clash")
    assert code == 1


def test_limit_of_bundled_diagram(capsys, fixtures_dir):
    ref = f"{fixtures_dir / 'manifest.json'}:staffing_of_departments"
    code, out, _ = run(capsys, "limit", ref, "--fresh-keys")
    assert code == 0
    assert sorted(json.loads(out)["rows"]) == ["r1", "r2", "r3"]


def test_out_file(capsys, tmp_path, fixtures_dir):
    target = tmp_path / "o.csv"
    code, out, _ = run(capsys, "image", f"{fixtures_dir / 'manifest.json'}:staffed", "--format", "csv",
                       "--out", target)
    assert code == 0 and out == ""
    assert target.read_text(encoding="utf-8").splitlines() == ["dept", "Eng", "Sales"]


def test_check_laws_passes_and_repeats(capsys):
    code, first, _ = run(capsys, "check-laws", "--seed", "0")
    assert code == 0
    assert all(line.startswith("PASS") for line in first.splitlines())
    code, second, _ = run(capsys, "check-laws", "--seed", "0")
    assert code == 0 and first == second


def test_module_entry_point(fixtures_dir):
    proc = subprocess.run([sys.executable, "-m", "cattables", "validate", str(fixtures_dir / "manifest.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "ok diagrams staffing_of_departments" in proc.stdout


@pytest.mark.parametrize("argv", [["join"], ["bogus"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2
