"""JSON and CSV formats and the workspace manifest.

Objects may embed their dependencies or refer to them by name; names are
looked up in the workspace, then tried as file paths relative to the
referring document.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Mapping

from .errors import CatTablesError, ResolutionError
from .relations import Relation
from .sets import FinFunction, FinSet
from .signatures import Signature, SignatureMorphism
from .tables import Table, TableMorphism, fiber_table_morphism
from .tuples import SignedDomain, SignedDomainMorphism, fiber_signed_morphism
from .typedomains import Infomorphism, TypeDomain

KINDS = ("domains", "signatures", "tables", "relations", "morphisms", "table_morphisms", "diagrams")


def dumps(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


def domain_to_json(A: TypeDomain) -> dict:
    return {"sorts": list(A.sorts), "values": list(A.values),
            "classification": [list(p) for p in sorted(A.classification)]}


def domain_from_json(obj: Mapping) -> TypeDomain:
    try:
        pairs = frozenset((str(x), str(y)) for x, y in obj["classification"])
        return TypeDomain(FinSet(map(str, obj["sorts"])), FinSet(map(str, obj["values"])), pairs)
    except (KeyError, TypeError, ValueError) as e:
        raise ResolutionError(f"malformed type domain: {e}") from None


def signature_to_json(sig: Signature) -> dict:
    return {"sorts": list(sig.sorts), "attributes": sig.attributes()}


def signature_from_json(obj: Mapping) -> Signature:
    try:
        return Signature.of({str(k): str(v) for k, v in obj["attributes"].items()}, map(str, obj["sorts"]))
    except (KeyError, TypeError, AttributeError) as e:
        raise ResolutionError(f"malformed signature: {e}") from None


def table_to_json(T: Table) -> dict:
    return {"signature": signature_to_json(T.signature), "domain": domain_to_json(T.domain.domain),
            "rows": {k: T.rows[k].as_dict() for k in T.keys}}


def relation_to_json(R: Relation) -> dict:
    return {"signature": signature_to_json(R.domain.signature), "domain": domain_to_json(R.domain.domain),
            "members": [t.as_dict() for t in R]}


def table_to_csv(T: Table) -> str:
    """Header of attribute names, one line per key in key order; keys are
    not written (import regenerates r1, r2, ...)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    attrs = T.signature.arity.elements
    w.writerow(attrs)
    for k in T.keys:
        w.writerow([T.rows[k][a] for a in attrs])
    return buf.getvalue()


def read_json(path: Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise ResolutionError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ResolutionError(f"{path} is not valid JSON: {e}") from None


def kind_of(obj: Any) -> str:
    if not isinstance(obj, dict):
        raise ResolutionError("expected a JSON object")
    if "edges" in obj:
        return "diagrams"
    if "rows" in obj or "csv" in obj:
        return "tables"
    if "members" in obj:
        return "relations"
    if "key_map" in obj:
        return "table_morphisms"
    if "arity_map" in obj:
        return "morphisms"
    if "classification" in obj:
        return "domains"
    if "attributes" in obj:
        return "signatures"
    if any(k in obj for k in KINDS):
        return "manifest"
    raise ResolutionError("cannot tell what kind of object this document holds")


class Workspace:
    """Named objects of every kind, loaded from a manifest on demand."""

    def __init__(self, base: Path | None = None, entries: Mapping[str, Mapping[str, Any]] | None = None):
        self.base = base or Path(".")
        self.entries = {k: dict((entries or {}).get(k, {})) for k in KINDS}
        self._cache: dict[tuple[str, str], Any] = {}
        self._loading: set[tuple[str, str]] = set()

    @classmethod
    def load(cls, manifest: Path) -> "Workspace":
        obj = read_json(manifest)
        if kind_of(obj) != "manifest":
            raise ResolutionError(f"{manifest} is not a workspace manifest")
        for k in KINDS:
            names = obj.get(k, {})
            if not isinstance(names, dict):
                raise ResolutionError(f"manifest section {k} must map names to entries")
        return cls(manifest.parent, obj)

    def names(self, kind: str) -> list[str]:
        return sorted(self.entries[kind])

    def get(self, kind: str, name: str, check: bool = True) -> Any:
        if name not in self.entries[kind]:
            raise ResolutionError(f"no {kind[:-1]} named {name}")
        key = (kind, name)
        if check and key in self._cache:
            return self._cache[key]
        if key in self._loading:
            raise ResolutionError(f"{kind[:-1]} {name} refers to itself")
        self._loading.add(key)
        try:
            entry = self.entries[kind][name]
            obj = self.build(kind, entry, self.base, check)
        finally:
            self._loading.discard(key)
        if check:
            self._cache[key] = obj
        return obj

    def resolve(self, kind: str, ref: Any, base: Path, check: bool = True) -> Any:
        """An embedded object, a workspace name, or a relative file path."""
        if isinstance(ref, dict):
            return self.build(kind, ref, base, check)
        if isinstance(ref, str):
            if ref in self.entries[kind]:
                return self.get(kind, ref, check)
            path = base / ref
            if path.is_file():
                return self.build(kind, str(ref), base, check)
            raise ResolutionError(f"unresolved {kind[:-1]} reference {ref!r}")
        raise ResolutionError(f"bad {kind[:-1]} reference {ref!r}")

    def build(self, kind: str, entry: Any, base: Path, check: bool = True) -> Any:
        if isinstance(entry, str):
            path = base / entry
            if kind == "tables" and path.suffix == ".csv":
                raise ResolutionError(f"CSV table {entry} needs a manifest entry with its signature")
            return self.build(kind, read_json(path), path.parent, check)
        if not isinstance(entry, dict):
            raise ResolutionError(f"bad {kind[:-1]} entry")
        if kind == "domains":
            return domain_from_json(entry)
        if kind == "signatures":
            return signature_from_json(entry)
        if kind == "tables":
            return self._table(entry, base, check)
        if kind == "relations":
            D = self._signed_domain(entry, base)
            return Relation(D, entry.get("members", []), check=check)
        if kind == "morphisms":
            return self._morphism(entry, base)
        if kind == "table_morphisms":
            return self._table_morphism(entry, base, check)
        if kind == "diagrams":
            return self._diagram(entry, base)
        raise ResolutionError(f"unknown kind {kind}")

    def _signed_domain(self, entry: Mapping, base: Path) -> SignedDomain:
        for field in ("signature", "domain"):
            if field not in entry:
                raise ResolutionError(f"missing {field} reference")
        sig = self.resolve("signatures", entry["signature"], base)
        dom = self.resolve("domains", entry["domain"], base)
        try:
            return SignedDomain(sig, dom)
        except CatTablesError as e:
            raise ResolutionError(str(e)) from None

    def _table(self, entry: Mapping, base: Path, check: bool) -> Table:
        D = self._signed_domain(entry, base)
        if "csv" in entry:
            rows = read_csv_rows(base / entry["csv"])
        else:
            rows = entry["rows"]
            if not isinstance(rows, dict):
                raise ResolutionError("table rows must map keys to row objects")
        try:
            return Table(D, FinSet(rows), {str(k): {str(a): str(v) for a, v in r.items()}
                                           for k, r in rows.items()}, check=check)
        except AttributeError:
            raise ResolutionError("every row must be an object of attribute values") from None

    def _morphism(self, entry: Mapping, base: Path) -> SignedDomainMorphism:
        src = self._signed_domain(_need(entry, "source"), base)
        tgt = self._signed_domain(_need(entry, "target"), base)
        h = FinFunction(src.signature.arity, tgt.signature.arity, _need(entry, "arity_map"))
        f = FinFunction(src.signature.sorts, tgt.signature.sorts,
                        entry.get("sort_map") or {x: x for x in src.signature.sorts})
        g = FinFunction(tgt.domain.values, src.domain.values,
                        entry.get("value_map") or {y: y for y in tgt.domain.values})
        return SignedDomainMorphism(SignatureMorphism(src.signature, tgt.signature, h, f),
                                    Infomorphism(src.domain, tgt.domain, f, g))

    def _table_morphism(self, entry: Mapping, base: Path, check: bool) -> TableMorphism:
        src = self.resolve("tables", _need(entry, "source"), base)
        tgt = self.resolve("tables", _need(entry, "target"), base)
        if "sort_map" not in entry and "value_map" not in entry:
            dom = fiber_signed_morphism(tgt.domain, src.domain, _need(entry, "arity_map"))
            return TableMorphism(src, tgt, dom, _need(entry, "key_map"), check=check)
        dom = self._morphism({"source": {"signature": signature_to_json(tgt.signature),
                                         "domain": domain_to_json(tgt.domain.domain)},
                              "target": {"signature": signature_to_json(src.signature),
                                         "domain": domain_to_json(src.domain.domain)},
                              "arity_map": _need(entry, "arity_map"), "sort_map": entry.get("sort_map"),
                              "value_map": entry.get("value_map")}, base)
        return TableMorphism(src, tgt, dom, _need(entry, "key_map"), check=check)

    def _diagram(self, entry: Mapping, base: Path):
        nodes = {str(n): self.resolve("tables", ref, base) for n, ref in _need(entry, "tables").items()}
        edges = []
        for e in _need(entry, "edges"):
            a, b = str(_need(e, "source")), str(_need(e, "target"))
            if a not in nodes or b not in nodes:
                raise ResolutionError(f"edge {a}→{b} mentions an unknown node")
            edges.append((a, b, fiber_table_morphism(nodes[a], nodes[b], _need(e, "arity_map"), _need(e, "key_map"))))
        dom = self.resolve("domains", entry["domain"], base) if "domain" in entry else None
        return nodes, edges, dom


def _need(entry: Mapping, field: str) -> Any:
    if not isinstance(entry, Mapping) or field not in entry:
        raise ResolutionError(f"missing field {field}")
    return entry[field]


def read_csv_rows(path: Path) -> dict[str, dict[str, str]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None:
                raise ResolutionError(f"{path} has no header row")
            rows = {}
            for n, line in enumerate(reader, start=1):
                if len(line) != len(header):
                    raise ResolutionError(f"{path}: line {n + 1} has {len(line)} fields, header has {len(header)}")
                rows[f"r{n}"] = dict(zip(header, line))
            return rows
    except OSError as e:
        raise ResolutionError(f"cannot read {path}: {e.strerror}") from None


def load_ref(ref: str, check: bool = True) -> tuple[str, Any, str]:
    """Load ``FILE`` or ``MANIFEST:NAME``; returns (kind, object, name)."""
    path = Path(ref)
    if not path.is_file() and ":" in ref:
        file_part, name = ref.rsplit(":", 1)
        ws = Workspace.load(Path(file_part))
        for kind in KINDS:
            if name in ws.entries[kind]:
                return kind, ws.get(kind, name, check), name
        raise ResolutionError(f"{file_part} has no entry named {name}")
    obj = read_json(path)
    kind = kind_of(obj)
    if kind == "manifest":
        raise ResolutionError(f"{ref} is a manifest; name an entry as {ref}:NAME")
    ws = Workspace(path.parent)
    return kind, ws.build(kind, obj, path.parent, check), path.stem
