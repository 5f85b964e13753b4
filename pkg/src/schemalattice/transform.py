"""Auditable unification operations over a context.

Each op maps an immutable context to a new one: merging akin field names,
renaming, merging whole structures, or restructuring one structure's field
set. Scripts replay deterministically, which is also how undo works
(re-apply the prefix, never invert an op).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .context import FormalContext, iter_bits
from .errors import (
    EmptyResultError,
    InvalidOpError,
    SchemaLatticeError,
    TargetExistsError,
    UnknownNameError,
)
from .lattice import DEFAULT_CONCEPT_CAP, build_lattice, labels, lattice_height
from .metrics import ContextStats, context_stats


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise InvalidOpError(message)


def _check_distinct(names: tuple[str, ...], what: str) -> None:
    _require(len(names) > 0, f"{what} must be non-empty")
    _require(all(names), f"{what} must not contain empty names")
    _require(len(set(names)) == len(names), f"{what} must be pairwise distinct")


@dataclass(frozen=True)
class MergeAttributes:
    sources: tuple[str, ...]
    target: str
    note: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "sources", tuple(self.sources))
        _check_distinct(self.sources, "merge sources")
        _require(bool(self.target), "merge target must be non-empty")


@dataclass(frozen=True)
class RenameAttribute:
    source: str
    target: str
    note: str = ""

    def __post_init__(self) -> None:
        _require(bool(self.source) and bool(self.target), "rename needs both names")


@dataclass(frozen=True)
class RenameObject:
    source: str
    target: str
    note: str = ""

    def __post_init__(self) -> None:
        _require(bool(self.source) and bool(self.target), "rename needs both names")


@dataclass(frozen=True)
class MergeObjects:
    sources: tuple[str, ...]
    target: str
    note: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "sources", tuple(self.sources))
        _check_distinct(self.sources, "merge sources")
        _require(bool(self.target), "merge target must be non-empty")


@dataclass(frozen=True)
class ReplaceFields:
    object: str
    remove: tuple[str, ...] = ()
    add: tuple[str, ...] = ()
    note: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "remove", tuple(self.remove))
        object.__setattr__(self, "add", tuple(self.add))
        _require(bool(self.object), "object name must be non-empty")
        _require(all(self.remove), "remove list must not contain empty names")
        _require(all(self.add), "add list must not contain empty names")
        _require(len(set(self.remove)) == len(self.remove), "remove names must be distinct")
        _require(len(set(self.add)) == len(self.add), "add names must be distinct")


TransformOp = MergeAttributes | RenameAttribute | RenameObject | MergeObjects | ReplaceFields


@dataclass(frozen=True)
class TransformScript:
    ops: tuple[TransformOp, ...]
    author: str = ""
    created_at: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))


@dataclass(frozen=True)
class TransformWarning:
    kind: str
    message: str
    count: int = 0

    def as_dict(self) -> dict:
        return {"kind": self.kind, "message": self.message, "count": self.count}


@dataclass(frozen=True)
class OpOutcome:
    status: str  # applied | rejected | skipped
    reason: str | None = None
    warnings: tuple[TransformWarning, ...] = ()

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "reason": self.reason,
            "warnings": [w.as_dict() for w in self.warnings],
        }


@dataclass(frozen=True)
class TransformReport:
    outcomes: tuple[OpOutcome, ...]
    stats_before: ContextStats
    stats_after: ContextStats

    def as_dict(self) -> dict:
        return {
            "outcomes": [o.as_dict() for o in self.outcomes],
            "stats_before": self.stats_before.as_dict(),
            "stats_after": self.stats_after.as_dict(),
        }


# -- op application ------------------------------------------------------------


def _merge_attribute_columns(
    ctx: FormalContext, sources: tuple[str, ...], target: str
) -> tuple[FormalContext, list[TransformWarning]]:
    source_idx = [ctx.attribute_index(s) for s in sources]
    merged = set(source_idx)
    if target in ctx.attributes:
        merged.add(ctx.attributes.index(target))
    anchor = source_idx[0]
    merged_mask = 0
    for m in merged:
        merged_mask |= 1 << m

    new_attrs: list[str] = []
    new_pos: dict[int, int] = {}
    for m, name in enumerate(ctx.attributes):
        if m == anchor:
            new_pos[m] = len(new_attrs)
            new_attrs.append(target)
        elif m in merged:
            continue
        else:
            new_pos[m] = len(new_attrs)
            new_attrs.append(name)
    target_bit = 1 << new_pos[anchor]

    collapsed = 0
    rows = []
    for row in ctx.rows:
        hit = row & merged_mask
        if hit.bit_count() >= 2:
            collapsed += 1
        new_row = 0
        for m in iter_bits(row & ~merged_mask):
            new_row |= 1 << new_pos[m]
        if hit:
            new_row |= target_bit
        rows.append(new_row)

    warnings = []
    if collapsed:
        warnings.append(
            TransformWarning(
                kind="collapsed_incidences",
                message=f"{collapsed} object(s) carried more than one of the merged fields",
                count=collapsed,
            )
        )
    return (
        FormalContext(ctx.objects, tuple(new_attrs), tuple(rows)),
        warnings,
    )


def _merge_object_rows(
    ctx: FormalContext, sources: tuple[str, ...], target: str
) -> tuple[FormalContext, list[TransformWarning]]:
    source_idx = [ctx.object_index(s) for s in sources]
    merged = set(source_idx)
    if target in ctx.objects:
        merged.add(ctx.objects.index(target))
    anchor = source_idx[0]

    union_row = 0
    seen_once = 0
    seen_twice = 0
    for g in merged:
        seen_twice |= seen_once & ctx.rows[g]
        seen_once |= ctx.rows[g]
        union_row |= ctx.rows[g]

    new_objects: list[str] = []
    rows: list[int] = []
    for g, name in enumerate(ctx.objects):
        if g == anchor:
            new_objects.append(target)
            rows.append(union_row)
        elif g in merged:
            continue
        else:
            new_objects.append(name)
            rows.append(ctx.rows[g])

    warnings = []
    collapsed = seen_twice.bit_count()
    if collapsed:
        warnings.append(
            TransformWarning(
                kind="collapsed_incidences",
                message=f"{collapsed} field(s) occurred in more than one of the merged structures",
                count=collapsed,
            )
        )
    return (
        FormalContext(tuple(new_objects), ctx.attributes, tuple(rows)),
        warnings,
    )


def _replace_fields(
    ctx: FormalContext, op: ReplaceFields, prune: bool
) -> tuple[FormalContext, list[TransformWarning]]:
    g = ctx.object_index(op.object)
    remove_idx = [ctx.attribute_index(name) for name in op.remove]

    attrs = list(ctx.attributes)
    for name in op.add:
        if name not in attrs:
            attrs.append(name)
    rows = list(ctx.rows)

    row = rows[g]
    for m in remove_idx:
        row &= ~(1 << m)
    for name in op.add:
        row |= 1 << attrs.index(name)
    rows[g] = row

    warnings: list[TransformWarning] = []
    if prune:
        cols = [0] * len(attrs)
        for row_mask in rows:
            for m in iter_bits(row_mask):
                cols[m] |= 1
        dead = [m for m in remove_idx if cols[m] == 0]
        if dead:
            if len(dead) == len(attrs):
                raise EmptyResultError(
                    "pruning would delete the last attribute of the context"
                )
            dead_set = set(dead)
            keep = [m for m in range(len(attrs)) if m not in dead_set]
            new_pos = {m: i for i, m in enumerate(keep)}
            rows = [
                sum(1 << new_pos[m] for m in iter_bits(row_mask) if m in new_pos)
                for row_mask in rows
            ]
            warnings.append(
                TransformWarning(
                    kind="pruned_attributes",
                    message="pruned now-empty attribute(s): "
                    + ", ".join(attrs[m] for m in dead),
                    count=len(dead),
                )
            )
            attrs = [attrs[m] for m in keep]

    return FormalContext(ctx.objects, tuple(attrs), tuple(rows)), warnings


def apply_op(
    ctx: FormalContext, op: TransformOp, prune: bool = True
) -> tuple[FormalContext, list[TransformWarning]]:
    """Apply one op, returning the new context and any warnings.

    Raises UnknownNameError, TargetExistsError or EmptyResultError when the
    op cannot be applied; the input context is never modified.
    """
    if isinstance(op, MergeAttributes):
        return _merge_attribute_columns(ctx, op.sources, op.target)
    if isinstance(op, MergeObjects):
        return _merge_object_rows(ctx, op.sources, op.target)
    if isinstance(op, RenameAttribute):
        m = ctx.attribute_index(op.source)
        if op.target == op.source:
            return ctx, []
        if op.target in ctx.attributes:
            raise TargetExistsError(
                f"attribute {op.target!r} already exists; use a merge to combine"
            )
        attrs = list(ctx.attributes)
        attrs[m] = op.target
        return FormalContext(ctx.objects, tuple(attrs), ctx.rows), []
    if isinstance(op, RenameObject):
        g = ctx.object_index(op.source)
        if op.target == op.source:
            return ctx, []
        if op.target in ctx.objects:
            raise TargetExistsError(f"object {op.target!r} already exists")
        objs = list(ctx.objects)
        objs[g] = op.target
        return FormalContext(tuple(objs), ctx.attributes, ctx.rows), []
    if isinstance(op, ReplaceFields):
        return _replace_fields(ctx, op, prune)
    raise InvalidOpError(f"unknown op type {type(op).__name__}")


def apply_script(
    ctx: FormalContext,
    script: TransformScript,
    on_error: str = "abort",
    prune: bool = True,
    max_concepts: int = DEFAULT_CONCEPT_CAP,
) -> tuple[FormalContext, TransformReport]:
    """Apply ops in order; a rejected op aborts (default) or is skipped.

    The report covers every op: applied ops with their warnings, the
    rejected op with its reason wrapped in the op index, and any ops left
    unapplied after an abort.
    """
    if on_error not in ("abort", "skip"):
        raise InvalidOpError(f"on_error must be 'abort' or 'skip', got {on_error!r}")
    stats_before = context_stats(ctx, max_concepts=max_concepts)
    outcomes: list[OpOutcome] = []
    current = ctx
    aborted = False
    for i, op in enumerate(script.ops):
        if aborted:
            outcomes.append(OpOutcome(status="skipped", reason="earlier op rejected"))
            continue
        try:
            current, warnings = apply_op(current, op, prune=prune)
        except SchemaLatticeError as exc:
            outcomes.append(OpOutcome(status="rejected", reason=f"op {i}: {exc}"))
            if on_error == "abort":
                aborted = True
        else:
            outcomes.append(OpOutcome(status="applied", warnings=tuple(warnings)))
    stats_after = context_stats(current, max_concepts=max_concepts)
    report = TransformReport(
        outcomes=tuple(outcomes),
        stats_before=stats_before,
        stats_after=stats_after,
    )
    return current, report


# -- diff and preview -----------------------------------------------------------


@dataclass(frozen=True)
class ContextDiff:
    attributes_added: tuple[str, ...]
    attributes_removed: tuple[str, ...]
    attributes_renamed: tuple[tuple[str, str], ...]
    objects_added: tuple[str, ...]
    objects_removed: tuple[str, ...]
    introducer_layer_changes: dict[str, tuple[int, int]]

    def as_dict(self) -> dict:
        return {
            "attributes_added": list(self.attributes_added),
            "attributes_removed": list(self.attributes_removed),
            "attributes_renamed": [list(pair) for pair in self.attributes_renamed],
            "objects_added": list(self.objects_added),
            "objects_removed": list(self.objects_removed),
            "introducer_layer_changes": {
                name: list(change)
                for name, change in sorted(self.introducer_layer_changes.items())
            },
        }

    @property
    def empty(self) -> bool:
        return not (
            self.attributes_added
            or self.attributes_removed
            or self.attributes_renamed
            or self.objects_added
            or self.objects_removed
            or self.introducer_layer_changes
        )


def _introducer_layers(
    ctx: FormalContext, max_concepts: int
) -> dict[str, int]:
    lat = build_lattice(ctx, max_concepts=max_concepts)
    lab = labels(ctx, lat)
    return {
        name: lat.layers[lab.attribute_introducer[m]]
        for m, name in enumerate(ctx.attributes)
    }


def diff_contexts(
    before: FormalContext,
    after: FormalContext,
    max_concepts: int = DEFAULT_CONCEPT_CAP,
) -> ContextDiff:
    """Attribute/object changes between two contexts.

    Renames are paired heuristically: a removed and an added attribute with
    identical extents (as object-name sets) count as one rename. Layer
    changes track each surviving attribute's introducer layer.
    """
    before_attrs = set(before.attributes)
    after_attrs = set(after.attributes)
    removed = sorted(before_attrs - after_attrs)
    added = sorted(after_attrs - before_attrs)

    def extent_names(ctx: FormalContext, name: str) -> frozenset[str]:
        return frozenset(ctx.object_names(ctx.cols[ctx.attribute_index(name)]))

    renamed: list[tuple[str, str]] = []
    unmatched_added = list(added)
    for old_name in list(removed):
        old_extent = extent_names(before, old_name)
        for new_name in unmatched_added:
            if old_extent and extent_names(after, new_name) == old_extent:
                renamed.append((old_name, new_name))
                unmatched_added.remove(new_name)
                removed.remove(old_name)
                break
    added = unmatched_added

    layers_before = _introducer_layers(before, max_concepts)
    layers_after = _introducer_layers(after, max_concepts)
    layer_changes = {
        name: (layers_before[name], layers_after[name])
        for name in sorted(before_attrs & after_attrs)
        if layers_before[name] != layers_after[name]
    }

    return ContextDiff(
        attributes_added=tuple(added),
        attributes_removed=tuple(removed),
        attributes_renamed=tuple(renamed),
        objects_added=tuple(sorted(set(after.objects) - set(before.objects))),
        objects_removed=tuple(sorted(set(before.objects) - set(after.objects))),
        introducer_layer_changes=layer_changes,
    )


@dataclass(frozen=True)
class LatticeDelta:
    concept_count_before: int
    concept_count_after: int
    height_before: int
    height_after: int
    introducer_layer_changes: dict[str, tuple[int, int]]

    def as_dict(self) -> dict:
        return {
            "concept_count_before": self.concept_count_before,
            "concept_count_after": self.concept_count_after,
            "height_before": self.height_before,
            "height_after": self.height_after,
            "introducer_layer_changes": {
                name: list(change)
                for name, change in sorted(self.introducer_layer_changes.items())
            },
        }

    @property
    def zero(self) -> bool:
        return (
            self.concept_count_before == self.concept_count_after
            and self.height_before == self.height_after
            and not self.introducer_layer_changes
        )


def preview(
    ctx: FormalContext,
    op: TransformOp,
    prune: bool = True,
    max_concepts: int = DEFAULT_CONCEPT_CAP,
) -> tuple[TransformReport, LatticeDelta | None]:
    """What apply_op plus a recompute would yield, without changing state.

    Returns the single-op report and the lattice delta, or a rejected
    report with ``None`` when the op cannot be applied.
    """
    stats_before = context_stats(ctx, max_concepts=max_concepts)
    try:
        changed, warnings = apply_op(ctx, op, prune=prune)
    except SchemaLatticeError as exc:
        report = TransformReport(
            outcomes=(OpOutcome(status="rejected", reason=str(exc)),),
            stats_before=stats_before,
            stats_after=stats_before,
        )
        return report, None
    stats_after = context_stats(changed, max_concepts=max_concepts)
    diff = diff_contexts(ctx, changed, max_concepts=max_concepts)
    delta = LatticeDelta(
        concept_count_before=stats_before.concept_count,
        concept_count_after=stats_after.concept_count,
        height_before=stats_before.lattice_height,
        height_after=stats_after.lattice_height,
        introducer_layer_changes=diff.introducer_layer_changes,
    )
    report = TransformReport(
        outcomes=(OpOutcome(status="applied", warnings=tuple(warnings)),),
        stats_before=stats_before,
        stats_after=stats_after,
    )
    return report, delta


# -- script serialization ---------------------------------------------------------

_OP_KINDS = {
    "merge_attributes": MergeAttributes,
    "rename_attribute": RenameAttribute,
    "rename_object": RenameObject,
    "merge_objects": MergeObjects,
    "replace_fields": ReplaceFields,
}


def parse_op(doc: dict) -> TransformOp:
    """Build an op from its JSON dict; InvalidOpError on malformed input."""
    if not isinstance(doc, dict):
        raise InvalidOpError("op must be a JSON object")
    kind = doc.get("op")
    if kind not in _OP_KINDS:
        raise InvalidOpError(f"unknown op kind {kind!r}")
    note = doc.get("note", "")
    if not isinstance(note, str):
        raise InvalidOpError("note must be a string")
    try:
        if kind == "merge_attributes":
            return MergeAttributes(tuple(doc["sources"]), doc["target"], note)
        if kind == "merge_objects":
            return MergeObjects(tuple(doc["sources"]), doc["target"], note)
        if kind == "rename_attribute":
            return RenameAttribute(doc["source"], doc["target"], note)
        if kind == "rename_object":
            return RenameObject(doc["source"], doc["target"], note)
        return ReplaceFields(
            doc["object"],
            tuple(doc.get("remove") or ()),
            tuple(doc.get("add") or ()),
            note,
        )
    except (KeyError, TypeError) as exc:
        raise InvalidOpError(f"malformed {kind} op: {exc}") from None


def op_to_dict(op: TransformOp) -> dict:
    if isinstance(op, MergeAttributes):
        doc: dict = {"op": "merge_attributes", "sources": list(op.sources), "target": op.target}
    elif isinstance(op, MergeObjects):
        doc = {"op": "merge_objects", "sources": list(op.sources), "target": op.target}
    elif isinstance(op, RenameAttribute):
        doc = {"op": "rename_attribute", "source": op.source, "target": op.target}
    elif isinstance(op, RenameObject):
        doc = {"op": "rename_object", "source": op.source, "target": op.target}
    elif isinstance(op, ReplaceFields):
        doc = {
            "op": "replace_fields",
            "object": op.object,
            "remove": list(op.remove),
            "add": list(op.add),
        }
    else:
        raise InvalidOpError(f"unknown op type {type(op).__name__}")
    if op.note:
        doc["note"] = op.note
    return doc


def parse_script(text: str) -> TransformScript:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidOpError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("ops"), list):
        raise InvalidOpError("script must be an object with an 'ops' list")
    metadata = doc.get("metadata") or {}
    return TransformScript(
        ops=tuple(parse_op(entry) for entry in doc["ops"]),
        author=metadata.get("author", ""),
        created_at=metadata.get("created_at", ""),
    )


def dump_script(script: TransformScript) -> str:
    doc = {
        "ops": [op_to_dict(op) for op in script.ops],
        "metadata": {"author": script.author, "created_at": script.created_at},
    }
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
