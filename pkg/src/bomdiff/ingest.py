"""Readers for CycloneDX JSON, SPDX JSON, and generic HBOM tables.

Every reader ends in the same normalization pipeline: optional name/ecosystem
filtering, duplicate collapsing, then canonical ordering, so downstream
comparison code never sees source-order artifacts.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace
from pathlib import Path

from bomdiff.model import (
    BomDocument,
    BomFormat,
    Component,
    Relationship,
    RelationshipKind,
    canonical_form,
)


class ParseError(ValueError):
    """Input claims a supported format but violates it; message carries the
    JSON path or row number of the offending field."""


class UnknownFormatError(ValueError):
    """No format discriminator matched the input."""


class DanglingParentError(ParseError):
    """HBOM row names a parent ref that no row defines."""


@dataclass(frozen=True)
class IngestOptions:
    dedup: bool = True
    fold_quantities: bool = True
    drop_name_prefixes: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "drop_name_prefixes", tuple(self.drop_name_prefixes)
        )
        for p in self.drop_name_prefixes:
            if not p:
                raise ValueError("drop_name_prefixes entries must be non-empty")


def detect_format(raw: bytes) -> BomFormat:
    """Sniff the input format from its discriminator fields.

    CycloneDX by bomFormat, SPDX by spdxVersion, HBOM for JSON carrying a
    top-level "hbom" array or for a CSV whose header has ref and name
    columns.
    """
    if not raw.strip():
        raise UnknownFormatError("empty input")
    try:
        data = json.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError):
        first = raw.lstrip()[:4096].decode("utf-8", "replace").splitlines()
        if first:
            header = [c.strip().lower() for c in first[0].split(",")]
            if "ref" in header and "name" in header:
                return BomFormat.GENERIC_HBOM
        raise UnknownFormatError("input is neither JSON nor a ref/name CSV table")
    if isinstance(data, dict):
        if data.get("bomFormat") == "CycloneDX":
            return BomFormat.CYCLONEDX_JSON
        if "spdxVersion" in data:
            return BomFormat.SPDX_JSON
        if "hbom" in data:
            return BomFormat.GENERIC_HBOM
    raise UnknownFormatError("no known BOM discriminator found")


def _load_json(raw) -> dict:
    if isinstance(raw, (bytes, bytearray)):
        raw = raw.decode("utf-8")
    try:
        data = json.loads(raw)
    except ValueError as e:
        raise ParseError(f"$: invalid JSON: {e}") from None
    if not isinstance(data, dict):
        raise ParseError("$: expected a JSON object")
    return data


def _require(entry: dict, key: str, path: str) -> object:
    value = entry.get(key)
    if value is None or value == "":
        raise ParseError(f"{path}.{key}: required field missing or empty")
    return value


def _opt_str(entry: dict, key: str, path: str):
    value = entry.get(key)
    if value is None or value == "":
        return None
    if not isinstance(value, str):
        raise ParseError(f"{path}.{key}: expected a string")
    return value


def _norm_hash(alg: str, digest: str) -> tuple[str, str]:
    return alg.upper().replace("-", ""), digest.lower()


def _purl_type(purl: str):
    if not purl.lower().startswith("pkg:"):
        return None
    rest = purl[4:].lstrip("/")
    head, sep, _ = rest.partition("/")
    return head.lower() if sep else None


# ---------------------------------------------------------------- CycloneDX


def parse_cyclonedx(
    raw, opts: IngestOptions = IngestOptions(), source_name: str = ""
) -> BomDocument:
    data = _load_json(raw)
    if data.get("bomFormat") != "CycloneDX":
        raise ParseError("$.bomFormat: expected 'CycloneDX'")
    spec_version = str(data.get("specVersion", ""))

    # Flatten nested assemblies first; parents tracked by position because
    # ids are only assigned afterwards.
    entries: list[dict] = []
    parent_of: list[int | None] = []
    paths: list[str] = []
    subtree_keys: list[str] = []

    def walk(items, parent_idx, path):
        if not isinstance(items, list):
            raise ParseError(f"{path}: expected an array")
        for i, entry in enumerate(items):
            here = f"{path}[{i}]"
            if not isinstance(entry, dict):
                raise ParseError(f"{here}: expected an object")
            entries.append(entry)
            parent_of.append(parent_idx)
            paths.append(here)
            idx = len(entries) - 1
            nested = entry.get("components")
            if nested is not None:
                walk(nested, idx, f"{here}.components")

    walk(data.get("components", []), None, "$.components")

    subject_entry = None
    meta = data.get("metadata")
    if isinstance(meta, dict) and isinstance(meta.get("component"), dict):
        subject_entry = meta["component"]
        entries.append(subject_entry)
        parent_of.append(None)
        paths.append("$.metadata.component")

    # Content signature including the (order-insensitive) assembly subtree,
    # so id generation below cannot depend on input array order.
    children_of: dict[int, list[int]] = {}
    for i, p in enumerate(parent_of):
        if p is not None:
            children_of.setdefault(p, []).append(i)
    memo: dict[int, str] = {}

    def subtree_key(i: int) -> str:
        if i not in memo:
            own = json.dumps(
                {k: v for k, v in entries[i].items() if k != "components"},
                sort_keys=True,
            )
            kids = sorted(subtree_key(c) for c in children_of.get(i, ()))
            memo[i] = own + "|" + ",".join(kids)
        return memo[i]

    ids: list[str | None] = [None] * len(entries)
    taken = set()
    for i, entry in enumerate(entries):
        ref = entry.get("bom-ref")
        if isinstance(ref, str) and ref:
            if ref in taken:
                raise ParseError(f"{paths[i]}.bom-ref: duplicate '{ref}'")
            ids[i] = ref
            taken.add(ref)

    # Refless components get content-derived ids, assigned in content order
    # so permuting the input array cannot change the result.
    def content_key(i):
        e = entries[i]
        return (
            str(e.get("name", "")),
            str(e.get("version", "")),
            str(e.get("purl", "")),
            subtree_key(i),
        )

    for i in sorted((i for i in range(len(entries)) if ids[i] is None), key=content_key):
        e = entries[i]
        base = e.get("purl") or (
            f"{e.get('name', '')}@{e.get('version')}"
            if e.get("version")
            else str(e.get("name", ""))
        )
        candidate, n = base, 1
        while candidate in taken:
            n += 1
            candidate = f"{base}#{n}"
        ids[i] = candidate
        taken.add(candidate)

    components = []
    for i, entry in enumerate(entries):
        components.append(_cdx_component(entry, ids[i], paths[i]))

    edges = set()
    for i, p in enumerate(parent_of):
        if p is not None:
            edges.add((ids[p], ids[i], RelationshipKind.CONTAINS))

    deps = data.get("dependencies", [])
    if not isinstance(deps, list):
        raise ParseError("$.dependencies: expected an array")
    for i, dep in enumerate(deps):
        if not isinstance(dep, dict):
            raise ParseError(f"$.dependencies[{i}]: expected an object")
        src = dep.get("ref")
        if not isinstance(src, str) or src not in taken:
            continue  # dangling source: unusable, skip
        for tgt in dep.get("dependsOn", []) or []:
            if isinstance(tgt, str) and tgt in taken and tgt != src:
                edges.add((src, tgt, RelationshipKind.DEPENDS_ON))

    subject_id = ids[-1] if subject_entry is not None else None
    if subject_id is not None:
        indeg = {t for _, t, _ in edges}
        for i, cid in enumerate(ids):
            if cid != subject_id and cid not in indeg:
                edges.add((subject_id, cid, RelationshipKind.DEPENDS_ON))

    doc = BomDocument(
        format=BomFormat.CYCLONEDX_JSON,
        spec_version=spec_version,
        subject=subject_id,
        components=tuple(components),
        relationships=tuple(Relationship(s, t, k) for s, t, k in edges),
        source_name=source_name,
    )
    return _finish(doc, opts)


def _cdx_component(entry: dict, cid: str, path: str) -> Component:
    name = _require(entry, "name", path)
    if not isinstance(name, str):
        raise ParseError(f"{path}.name: expected a string")

    vendor = None
    supplier = entry.get("supplier")
    if isinstance(supplier, dict):
        vendor = _opt_str(supplier, "name", f"{path}.supplier")

    licenses = []
    for j, lic in enumerate(entry.get("licenses", []) or []):
        lpath = f"{path}.licenses[{j}]"
        if not isinstance(lic, dict):
            raise ParseError(f"{lpath}: expected an object")
        if isinstance(lic.get("license"), dict):
            value = lic["license"].get("id") or lic["license"].get("name")
        else:
            value = lic.get("expression")
        if isinstance(value, str) and value and value not in licenses:
            licenses.append(value)

    hashes = []
    for j, h in enumerate(entry.get("hashes", []) or []):
        hpath = f"{path}.hashes[{j}]"
        if not isinstance(h, dict):
            raise ParseError(f"{hpath}: expected an object")
        alg = _require(h, "alg", hpath)
        digest = _require(h, "content", hpath)
        pair = _norm_hash(str(alg), str(digest))
        if pair not in hashes:
            hashes.append(pair)

    extra = [
        (f"cdx:{key}", entry[key])
        for key in ("group", "type", "scope")
        if isinstance(entry.get(key), str) and entry[key]
    ]

    return Component(
        id=cid,
        name=name,
        version=_opt_str(entry, "version", path),
        purl=_opt_str(entry, "purl", path),
        cpe=_opt_str(entry, "cpe", path),
        vendor=vendor,
        licenses=tuple(licenses),
        hashes=tuple(hashes),
        extra=tuple(extra),
    )


# --------------------------------------------------------------------- SPDX


def parse_spdx(
    raw, opts: IngestOptions = IngestOptions(), source_name: str = ""
) -> BomDocument:
    data = _load_json(raw)
    if "spdxVersion" not in data:
        raise ParseError("$.spdxVersion: required field missing")
    spec_version = str(data["spdxVersion"])

    packages = data.get("packages", [])
    if not isinstance(packages, list):
        raise ParseError("$.packages: expected an array")

    parsed: dict[str, dict] = {}
    order: list[str] = []
    for i, pkg in enumerate(packages):
        path = f"$.packages[{i}]"
        if not isinstance(pkg, dict):
            raise ParseError(f"{path}: expected an object")
        sid = _require(pkg, "SPDXID", path)
        if not isinstance(sid, str):
            raise ParseError(f"{path}.SPDXID: expected a string")
        if sid in parsed:
            raise ParseError(f"{path}.SPDXID: duplicate '{sid}'")
        parsed[sid] = _spdx_fields(pkg, path)
        order.append(sid)

    edges = set()
    subject_id = None
    rel_extra: dict[str, dict[str, list[str]]] = {}
    for i, rel in enumerate(data.get("relationships", []) or []):
        path = f"$.relationships[{i}]"
        if not isinstance(rel, dict):
            raise ParseError(f"{path}: expected an object")
        rtype = str(_require(rel, "relationshipType", path))
        a = rel.get("spdxElementId")
        b = rel.get("relatedSpdxElement")
        if rtype == "DESCRIBES":
            if subject_id is None and b in parsed:
                subject_id = b
            continue
        if a not in parsed or b not in parsed or a == b:
            continue
        if rtype == "DEPENDS_ON":
            edges.add((a, b, RelationshipKind.DEPENDS_ON))
        elif rtype == "CONTAINS":
            edges.add((a, b, RelationshipKind.CONTAINS))
        else:
            rel_extra.setdefault(a, {}).setdefault(rtype, []).append(b)

    if subject_id is None:
        described = data.get("documentDescribes")
        if isinstance(described, list):
            for sid in described:
                if sid in parsed:
                    subject_id = sid
                    break

    components = []
    for sid in order:
        fields = parsed[sid]
        extra = list(fields.pop("extra"))
        for rtype, targets in sorted(rel_extra.get(sid, {}).items()):
            extra.append((f"relationship:{rtype}", ",".join(sorted(targets))))
        components.append(Component(id=sid, extra=tuple(extra), **fields))

    doc = BomDocument(
        format=BomFormat.SPDX_JSON,
        spec_version=spec_version,
        subject=subject_id,
        components=tuple(components),
        relationships=tuple(Relationship(s, t, k) for s, t, k in edges),
        source_name=source_name,
    )
    return _finish(doc, opts)


_NO_VALUE = ("NOASSERTION", "NONE")


def _spdx_fields(pkg: dict, path: str) -> dict:
    name = _require(pkg, "name", path)
    if not isinstance(name, str):
        raise ParseError(f"{path}.name: expected a string")

    purl = cpe = None
    for j, ref in enumerate(pkg.get("externalRefs", []) or []):
        rpath = f"{path}.externalRefs[{j}]"
        if not isinstance(ref, dict):
            raise ParseError(f"{rpath}: expected an object")
        rtype = ref.get("referenceType")
        locator = ref.get("referenceLocator")
        if not isinstance(locator, str) or not locator:
            continue
        if rtype == "purl" and purl is None:
            purl = locator
        elif rtype in ("cpe23Type", "cpe22Type") and cpe is None:
            cpe = locator

    vendor = _opt_str(pkg, "supplier", path)
    if vendor:
        if vendor in _NO_VALUE:
            vendor = None
        else:
            # "Organization: Acme" / "Person: Jane" tags carry no signal
            # for vendor comparison.
            head, sep, tail = vendor.partition(":")
            if sep and head.strip() in ("Organization", "Person"):
                vendor = tail.strip() or None

    licenses = []
    for key in ("licenseConcluded", "licenseDeclared"):
        value = pkg.get(key)
        if isinstance(value, str) and value and value not in _NO_VALUE:
            if value not in licenses:
                licenses.append(value)

    hashes = []
    for j, ck in enumerate(pkg.get("checksums", []) or []):
        cpath = f"{path}.checksums[{j}]"
        if not isinstance(ck, dict):
            raise ParseError(f"{cpath}: expected an object")
        alg = _require(ck, "algorithm", cpath)
        digest = _require(ck, "checksumValue", cpath)
        pair = _norm_hash(str(alg), str(digest))
        if pair not in hashes:
            hashes.append(pair)

    return {
        "name": name,
        "version": _opt_str(pkg, "versionInfo", path),
        "purl": purl,
        "cpe": cpe,
        "vendor": vendor,
        "licenses": tuple(licenses),
        "hashes": tuple(hashes),
        "extra": (),
    }


# --------------------------------------------------------------------- HBOM


_HBOM_COLUMNS = ("ref", "name", "parent", "vendor", "quantity")


def parse_hbom(
    raw, opts: IngestOptions = IngestOptions(), source_name: str = ""
) -> BomDocument:
    if isinstance(raw, (bytes, bytearray)):
        raw = raw.decode("utf-8")
    rows = _hbom_rows(raw)

    by_ref: dict[str, Component] = {}
    parent_ref: dict[str, str] = {}
    row_no: dict[str, int] = {}
    for n, row in rows:
        ref = (row.get("ref") or "").strip()
        name = (row.get("name") or "").strip()
        if not ref:
            raise ParseError(f"row {n}: ref must be non-empty")
        if ref in by_ref:
            raise ParseError(f"row {n}: duplicate ref '{ref}'")
        if not name:
            raise ParseError(f"row {n}: name must be non-empty")

        qraw = (str(row.get("quantity")) if row.get("quantity") is not None else "").strip()
        if qraw:
            try:
                quantity = int(qraw)
            except ValueError:
                raise ParseError(f"row {n}: quantity '{qraw}' is not an integer") from None
            if quantity < 1:
                raise ParseError(f"row {n}: quantity must be >= 1, got {quantity}")
        else:
            quantity = 1

        parent = (row.get("parent") or "").strip()
        if parent == ref:
            raise ParseError(f"row {n}: component cannot be its own parent")
        if parent:
            parent_ref[ref] = parent

        extra = tuple(
            (k, str(v).strip())
            for k, v in sorted(row.items())
            if k not in _HBOM_COLUMNS and v is not None and str(v).strip()
        )
        by_ref[ref] = Component(
            id=ref,
            name=name,
            vendor=(row.get("vendor") or "").strip() or None,
            quantity=quantity,
            extra=extra,
        )
        row_no[ref] = n

    for ref, parent in parent_ref.items():
        if parent not in by_ref:
            raise DanglingParentError(
                f"row {row_no[ref]}: parent '{parent}' does not match any ref"
            )

    components = list(by_ref.values())
    edges = {
        (parent, ref, RelationshipKind.CONTAINS) for ref, parent in parent_ref.items()
    }

    if opts.fold_quantities:
        components, edges = _fold_quantities(components, edges)

    # Rows without a parent hang off the per-source root that graph
    # construction adds; the table itself records no subject component.
    doc = BomDocument(
        format=BomFormat.GENERIC_HBOM,
        spec_version="",
        subject=None,
        components=tuple(components),
        relationships=tuple(Relationship(s, t, k) for s, t, k in edges),
        source_name=source_name,
    )
    return _finish(doc, opts)


def _hbom_rows(text: str) -> list[tuple[int, dict]]:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = _load_json(text)
        items = data.get("hbom")
        if not isinstance(items, list):
            raise ParseError("$.hbom: expected an array")
        out = []
        for i, item in enumerate(items):
            if not isinstance(item, dict):
                raise ParseError(f"$.hbom[{i}]: expected an object")
            out.append((i + 1, {str(k): item[k] for k in item}))
        return out

    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ParseError("row 1: missing CSV header")
    header = [h.strip() for h in reader.fieldnames]
    if "ref" not in header or "name" not in header:
        raise ParseError("row 1: CSV header must include 'ref' and 'name'")
    out = []
    for i, row in enumerate(reader):
        if None in row:
            raise ParseError(f"row {i + 2}: more cells than header columns")
        out.append((i + 2, {(k or "").strip(): v for k, v in row.items()}))
    return out


def _fold_quantities(components, edges):
    """Merge components identical in (name, vendor, parent), summing quantity.

    Runs to a fixpoint: merging two parents can make their children's keys
    collide, which requires another pass.
    """
    comps = {c.id: c for c in components}
    edges = set(edges)
    while True:
        parent_of: dict[str, str] = {}
        for s, t, k in edges:
            if k is RelationshipKind.CONTAINS:
                parent_of[t] = s
        groups: dict[tuple, list[str]] = {}
        for cid, c in comps.items():
            groups.setdefault((c.name, c.vendor, parent_of.get(cid)), []).append(cid)

        remap = {}
        for members in groups.values():
            if len(members) < 2:
                continue
            members.sort()
            survivor = members[0]
            total = sum(comps[m].quantity for m in members)
            comps[survivor] = replace(comps[survivor], quantity=total)
            for m in members[1:]:
                remap[m] = survivor
                del comps[m]
        if not remap:
            return list(comps.values()), edges

        edges = {
            (remap.get(s, s), remap.get(t, t), k)
            for s, t, k in edges
            if remap.get(s, s) != remap.get(t, t)
        }


# ------------------------------------------------------- shared pipeline


def dedup_components(doc: BomDocument) -> BomDocument:
    """Collapse components sharing purl and recorded metadata.

    Survivor is the smallest id in each group; edges to removed copies are
    rewired to the survivor, and edge duplicates or self-loops produced by
    the rewiring are dropped. Components without a purl never merge.
    """
    groups: dict[tuple, list[Component]] = {}
    for c in doc.components:
        if c.purl is None:
            continue
        key = (
            c.purl,
            c.name,
            c.version,
            c.vendor,
            tuple(sorted(c.licenses)),
            tuple(sorted(c.hashes)),
        )
        groups.setdefault(key, []).append(c)

    remap: dict[str, str] = {}
    for members in groups.values():
        if len(members) < 2:
            continue
        ids = sorted(c.id for c in members)
        for dup in ids[1:]:
            remap[dup] = ids[0]
    if not remap:
        return doc

    components = tuple(c for c in doc.components if c.id not in remap)
    rewired = {
        (remap.get(r.source, r.source), remap.get(r.target, r.target), r.kind)
        for r in doc.relationships
    }
    relationships = tuple(
        Relationship(s, t, k) for s, t, k in rewired if s != t
    )
    subject = remap.get(doc.subject, doc.subject) if doc.subject else None
    return replace(
        doc, components=components, relationships=relationships, subject=subject
    )


def _drop_prefixes(doc: BomDocument, prefixes) -> BomDocument:
    """Remove components whose purl ecosystem equals, or name starts with,
    one of the given entries. The subject is never dropped."""
    if not prefixes:
        return doc

    def drops(c: Component) -> bool:
        if c.id == doc.subject:
            return False
        ptype = _purl_type(c.purl) if c.purl else None
        return any(p == ptype or c.name.startswith(p) for p in prefixes)

    dropped = {c.id for c in doc.components if drops(c)}
    if not dropped:
        return doc
    return replace(
        doc,
        components=tuple(c for c in doc.components if c.id not in dropped),
        relationships=tuple(
            r
            for r in doc.relationships
            if r.source not in dropped and r.target not in dropped
        ),
    )


def _finish(doc: BomDocument, opts: IngestOptions) -> BomDocument:
    doc = _drop_prefixes(doc, opts.drop_name_prefixes)
    if opts.dedup:
        doc = dedup_components(doc)
    return canonical_form(doc)


# ----------------------------------------------------------------- loading


_PARSERS = {
    BomFormat.CYCLONEDX_JSON: parse_cyclonedx,
    BomFormat.SPDX_JSON: parse_spdx,
    BomFormat.GENERIC_HBOM: parse_hbom,
}


def parse_document(
    raw: bytes,
    opts: IngestOptions = IngestOptions(),
    source_name: str = "",
    format_hint: BomFormat | None = None,
) -> BomDocument:
    fmt = format_hint or detect_format(raw)
    return _PARSERS[fmt](raw, opts, source_name)


def load_document(
    path,
    opts: IngestOptions = IngestOptions(),
    format_hint: BomFormat | None = None,
) -> BomDocument:
    p = Path(path)
    return parse_document(p.read_bytes(), opts, str(path), format_hint)
