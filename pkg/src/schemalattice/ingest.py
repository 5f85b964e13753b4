"""Schema-source parsers and context serialization.

Sources (Elasticsearch index mappings, InfluxDB measurement schemas, cross
tables) are normalized into SchemaRecord entries; a Catalog of records then
becomes a FormalContext with one object per structure and one attribute per
distinct field name.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass, field

from .context import FormalContext, build_context
from .errors import (
    BadCellError,
    CountMismatchError,
    DuplicateMeasurementError,
    DuplicateNameError,
    EmptyPropertiesError,
    InvalidNameError,
    MalformedHeaderError,
    MissingNameError,
    NotAMappingError,
    RaggedRowError,
)

SOURCE_KINDS = ("elasticsearch", "influxdb", "generic")


@dataclass(frozen=True)
class SchemaRecord:
    """One data structure (measurement, index, table) and its field names."""

    structure_name: str
    fields: frozenset[str]
    source_kind: str = "generic"
    group_path: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.structure_name:
            raise InvalidNameError("structure_name must be non-empty")
        if self.source_kind not in SOURCE_KINDS:
            raise InvalidNameError(f"unknown source_kind {self.source_kind!r}")


@dataclass
class Catalog:
    """An ordered collection of schema records with unique structure names."""

    records: list[SchemaRecord] = field(default_factory=list)

    def __post_init__(self) -> None:
        seen = set()
        for rec in self.records:
            if rec.structure_name in seen:
                raise DuplicateNameError(
                    f"duplicate structure name {rec.structure_name!r} in catalog"
                )
            seen.add(rec.structure_name)

    def add(self, record: SchemaRecord) -> None:
        if any(r.structure_name == record.structure_name for r in self.records):
            raise DuplicateNameError(
                f"duplicate structure name {record.structure_name!r} in catalog"
            )
        self.records.append(record)


# -- Burmeister CXT ----------------------------------------------------------

def parse_cxt(text: str) -> FormalContext:
    """Parse Burmeister interchange text into a context.

    Expected layout: header ``B``, blank line, object count, attribute
    count, blank line, object names, attribute names, one incidence row per
    object over the alphabet {X, x, .}.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != "B":
        raise MalformedHeaderError("CXT input must start with a 'B' header line")
    if len(lines) < 5:
        raise CountMismatchError("CXT input truncated before the count lines")
    if lines[1] != "":
        raise MalformedHeaderError("expected a blank line after the header")
    try:
        n_objects = int(lines[2])
        n_attributes = int(lines[3])
    except ValueError:
        raise MalformedHeaderError("object/attribute counts must be integers") from None
    if n_objects < 0 or n_attributes < 0:
        raise MalformedHeaderError("object/attribute counts must be non-negative")
    if lines[4] != "":
        raise MalformedHeaderError("expected a blank line after the count lines")

    body = lines[5:]
    expected = n_objects + n_attributes + n_objects
    if len(body) < expected:
        raise CountMismatchError(
            f"expected {expected} name/row lines, found {len(body)}"
        )
    if any(extra != "" for extra in body[expected:]):
        raise CountMismatchError("unexpected trailing content after incidence rows")

    objects = body[:n_objects]
    attributes = body[n_objects : n_objects + n_attributes]
    rows = []
    for g, line in enumerate(body[n_objects + n_attributes : expected]):
        if len(line) != n_attributes:
            raise CountMismatchError(
                f"row {g} has {len(line)} cells, expected {n_attributes}"
            )
        mask = 0
        for m, cell in enumerate(line):
            if cell in ("X", "x"):
                mask |= 1 << m
            elif cell != ".":
                raise BadCellError(f"row {g} cell {m}: invalid character {cell!r}")
        rows.append(mask)
    return FormalContext(tuple(objects), tuple(attributes), tuple(rows))


def write_cxt(ctx: FormalContext) -> str:
    """Render a context in canonical CXT form (``X`` and ``.`` cells)."""
    out = ["B", "", str(ctx.n_objects), str(ctx.n_attributes), ""]
    out.extend(ctx.objects)
    out.extend(ctx.attributes)
    for row in ctx.rows:
        out.append(
            "".join("X" if row >> m & 1 else "." for m in range(ctx.n_attributes))
        )
    return "\n".join(out) + "\n"


# -- CSV cross table ----------------------------------------------------------

_TRUE_CELLS = {"X", "x", "1"}
_FALSE_CELLS = {"", "0"}


def parse_csv_crosstable(text: str) -> FormalContext:
    """Parse a CSV cross table: header = attribute names, first column =
    object names, cells X/x/1 for incidence and empty/0 for none."""
    reader = csv.reader(io.StringIO(text))
    table = list(reader)
    if not table:
        return FormalContext((), (), ())
    header = table[0]
    attributes = header[1:]
    objects = []
    rows = []
    for line_no, cells in enumerate(table[1:], start=2):
        if len(cells) != len(header):
            raise RaggedRowError(
                f"line {line_no}: {len(cells)} cells, expected {len(header)}"
            )
        objects.append(cells[0])
        mask = 0
        for m, cell in enumerate(cells[1:]):
            if cell in _TRUE_CELLS:
                mask |= 1 << m
            elif cell not in _FALSE_CELLS:
                raise BadCellError(f"line {line_no}: invalid cell {cell!r}")
        rows.append(mask)
    return FormalContext(tuple(objects), tuple(attributes), tuple(rows))


def write_csv_crosstable(ctx: FormalContext) -> str:
    """Render a context as a CSV cross table with an empty corner cell."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + list(ctx.attributes))
    for name, row in zip(ctx.objects, ctx.rows):
        writer.writerow(
            [name] + ["X" if row >> m & 1 else "" for m in range(ctx.n_attributes)]
        )
    return buf.getvalue()


# -- Elasticsearch mappings ----------------------------------------------------

def parse_es_mapping(text: str, index_name: str, strict: bool = False) -> SchemaRecord:
    """Extract field names from an index mapping document.

    Nested property trees are flattened by joining path segments with ".".
    An empty ``properties`` object is a warning, or EmptyPropertiesError in
    strict mode.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NotAMappingError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise NotAMappingError("mapping document must be a JSON object")
    # Accept the GET /<index>/_mapping response shape as well.
    if index_name in doc and isinstance(doc[index_name], dict):
        doc = doc[index_name]
    if "mappings" in doc and isinstance(doc["mappings"], dict):
        doc = doc["mappings"]
    properties = doc.get("properties")
    if not isinstance(properties, dict):
        raise NotAMappingError("no 'properties' object found in mapping")
    if not properties:
        if strict:
            raise EmptyPropertiesError(f"mapping for {index_name!r} declares no fields")
        warnings.warn(f"mapping for {index_name!r} declares no fields")

    fields: set[str] = set()

    def walk(props: dict, prefix: str) -> None:
        for key, value in props.items():
            if "." in key:
                warnings.warn(
                    f"field name {key!r} contains '.'; flattening is ambiguous"
                )
            path = f"{prefix}{key}"
            sub = value.get("properties") if isinstance(value, dict) else None
            if isinstance(sub, dict) and sub:
                walk(sub, path + ".")
            else:
                fields.add(path)

    walk(properties, "")
    return SchemaRecord(
        structure_name=index_name,
        fields=frozenset(fields),
        source_kind="elasticsearch",
    )


# -- InfluxDB measurement schemas ------------------------------------------------

def parse_influx_schema(text: str) -> Catalog:
    """Parse a measurement schema document into a catalog.

    Expected shape: {"measurements": [{"name", "tags", "fields"}]}. Tags and
    fields are merged into one attribute set per measurement.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NotAMappingError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("measurements"), list):
        raise NotAMappingError("expected a 'measurements' list")
    catalog = Catalog()
    for entry in doc["measurements"]:
        if not isinstance(entry, dict) or not entry.get("name"):
            raise MissingNameError("measurement entry without a name")
        name = entry["name"]
        if any(r.structure_name == name for r in catalog.records):
            raise DuplicateMeasurementError(f"duplicate measurement {name!r}")
        tags = entry.get("tags") or []
        value_fields = entry.get("fields") or []
        record = SchemaRecord(
            structure_name=name,
            fields=frozenset(tags) | frozenset(value_fields),
            source_kind="influxdb",
            group_path=tuple(entry.get("group_path") or ()),
        )
        catalog.records.append(record)
    return catalog


# -- catalog <-> context --------------------------------------------------------

def catalog_to_context(catalog: Catalog) -> FormalContext:
    """Objects in catalog order, attributes as the sorted union of fields."""
    objects = [r.structure_name for r in catalog.records]
    attribute_set: set[str] = set()
    for record in catalog.records:
        attribute_set |= record.fields
    attributes = sorted(attribute_set)
    pairs = [
        (record.structure_name, field_name)
        for record in catalog.records
        for field_name in record.fields
    ]
    return build_context(objects, attributes, pairs)


def context_to_catalog(ctx: FormalContext, source_kind: str = "generic") -> Catalog:
    """Turn context rows back into schema records (used when mixing inputs)."""
    records = [
        SchemaRecord(
            structure_name=name,
            fields=frozenset(ctx.attribute_names(row)),
            source_kind=source_kind,
        )
        for name, row in zip(ctx.objects, ctx.rows)
    ]
    return Catalog(records)


def context_document(ctx: FormalContext) -> dict:
    """The context as a plain dict: names plus per-object attribute indices."""
    return {
        "objects": list(ctx.objects),
        "attributes": list(ctx.attributes),
        "incidence": [
            [m for m in range(ctx.n_attributes) if row >> m & 1] for row in ctx.rows
        ],
    }


def context_from_document(doc: dict) -> FormalContext:
    if (
        not isinstance(doc, dict)
        or not isinstance(doc.get("objects"), list)
        or not isinstance(doc.get("attributes"), list)
        or not isinstance(doc.get("incidence"), list)
    ):
        raise NotAMappingError("expected objects/attributes/incidence keys")
    rows = []
    n_attrs = len(doc["attributes"])
    for entry in doc["incidence"]:
        mask = 0
        for m in entry:
            if not isinstance(m, int) or not 0 <= m < n_attrs:
                raise BadCellError(f"attribute index {m!r} out of range")
            mask |= 1 << m
        rows.append(mask)
    return FormalContext(tuple(doc["objects"]), tuple(doc["attributes"]), tuple(rows))


def dump_context_json(ctx: FormalContext) -> str:
    return json.dumps(context_document(ctx), ensure_ascii=False, indent=2) + "\n"


def load_context_json(text: str) -> FormalContext:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NotAMappingError(f"invalid JSON: {exc}") from None
    return context_from_document(doc)


def load_catalog_json(text: str) -> Catalog:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NotAMappingError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("records"), list):
        raise NotAMappingError("expected a 'records' list")
    records = []
    for entry in doc["records"]:
        if not entry.get("structure_name"):
            raise MissingNameError("record without a structure_name")
        records.append(
            SchemaRecord(
                structure_name=entry["structure_name"],
                fields=frozenset(entry.get("fields") or ()),
                source_kind=entry.get("source_kind", "generic"),
                group_path=tuple(entry.get("group_path") or ()),
            )
        )
    return Catalog(records)


def dump_catalog_json(catalog: Catalog) -> str:
    doc = {
        "records": [
            {
                "structure_name": r.structure_name,
                "source_kind": r.source_kind,
                "fields": sorted(r.fields),
                "group_path": list(r.group_path),
            }
            for r in catalog.records
        ]
    }
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
