"""Concept enumeration and lattice construction.

Enumeration uses Close-by-One with the canonicity test on attribute
prefixes, so each closed intent is generated exactly once without storing
the set of seen concepts. The Hasse diagram is the transitive reduction of
extent inclusion, and layers follow the longest path from the top concept.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .context import FormalContext, bit_indices
from .errors import (
    InconsistentInputError,
    ResourceLimitExceededError,
    UnsupportedFormatError,
)

DEFAULT_CONCEPT_CAP = 1_000_000


@dataclass(frozen=True)
class Concept:
    """A closed (extent, intent) pair, both as bitmasks of one context."""

    extent: int
    intent: int


@dataclass(frozen=True)
class ConceptLattice:
    """All concepts of a context plus the cover relation and layering.

    ``concepts`` is in canonical order: decreasing extent size, ties broken
    by lexicographic comparison of the intent index tuples. ``covers`` holds
    (parent, child) index pairs where the parent extent strictly contains
    the child extent with nothing in between. ``layers[i]`` is the longest
    edge distance from the top concept to concept ``i``.
    """

    concepts: tuple[Concept, ...]
    covers: tuple[tuple[int, int], ...]
    top_index: int
    bottom_index: int
    layers: tuple[int, ...]


def enumerate_concepts(
    ctx: FormalContext, max_concepts: int = DEFAULT_CONCEPT_CAP
) -> list[Concept]:
    """Every formal concept of ``ctx``, in canonical order.

    Raises ResourceLimitExceededError once more than ``max_concepts``
    concepts are generated.
    """
    found: list[tuple[int, int]] = []

    def close_from(extent: int, intent: int, min_attr: int) -> None:
        found.append((extent, intent))
        if len(found) > max_concepts:
            raise ResourceLimitExceededError(
                f"more than {max_concepts} concepts; raise the cap to proceed"
            )
        for m in range(min_attr, ctx.n_attributes):
            if intent >> m & 1:
                continue
            new_extent = extent & ctx.cols[m]
            new_intent = ctx.intent(new_extent)
            # Canonicity: adding attribute m must not pull in any attribute
            # below m that the current intent lacks.
            if (new_intent & ~intent) & ((1 << m) - 1):
                continue
            close_from(new_extent, new_intent, m + 1)

    top_extent = ctx.all_objects
    close_from(top_extent, ctx.intent(top_extent), 0)
    found.sort(key=lambda c: (-c[0].bit_count(), bit_indices(c[1])))
    return [Concept(extent, intent) for extent, intent in found]


def build_lattice(
    ctx: FormalContext,
    concepts: list[Concept] | None = None,
    max_concepts: int = DEFAULT_CONCEPT_CAP,
) -> ConceptLattice:
    """Order the concepts of ``ctx`` into a lattice with covers and layers.

    When ``concepts`` is given it must be exactly the closure family of the
    context (any order); otherwise InconsistentInputError is raised.
    """
    canonical = enumerate_concepts(ctx, max_concepts=max_concepts)
    if concepts is not None and set(concepts) != set(canonical):
        raise InconsistentInputError(
            "supplied concepts are not the closure family of the context"
        )
    concepts = canonical

    n = len(concepts)
    extents = [c.extent for c in concepts]
    covers: list[tuple[int, int]] = []
    parents_of: list[list[int]] = [[] for _ in range(n)]
    # Canonical order sorts parents (strictly larger extents) first, so for
    # each child we scan candidates small-to-large and keep the minimal ones.
    for child in range(n):
        ext = extents[child]
        candidates = [
            j for j in range(child) if extents[j] != ext and extents[j] & ext == ext
        ]
        chosen: list[int] = []
        for j in sorted(candidates, key=lambda j: extents[j].bit_count()):
            if not any(extents[p] & extents[j] == extents[p] for p in chosen):
                chosen.append(j)
        for p in chosen:
            parents_of[child].append(p)
            covers.append((p, child))
    covers.sort()

    layers = [0] * n
    for child in range(n):
        if parents_of[child]:
            layers[child] = 1 + max(layers[p] for p in parents_of[child])

    top_index = extents.index(ctx.all_objects)
    bottom_extent = ctx.extent(ctx.all_attributes)
    bottom_index = extents.index(bottom_extent)
    return ConceptLattice(
        concepts=tuple(concepts),
        covers=tuple(covers),
        top_index=top_index,
        bottom_index=bottom_index,
        layers=tuple(layers),
    )


def lattice_height(lat: ConceptLattice) -> int:
    """Number of concepts on a longest top-to-bottom chain."""
    return lat.layers[lat.bottom_index] + 1


@dataclass(frozen=True)
class LabelAssignment:
    """Reduced labeling: where each attribute and object is introduced.

    ``attribute_introducer[m]`` is the index of the maximal concept whose
    intent contains attribute ``m``; ``object_introducer[g]`` the minimal
    concept whose extent contains object ``g``.
    """

    attribute_introducer: tuple[int, ...]
    object_introducer: tuple[int, ...]


def labels(ctx: FormalContext, lat: ConceptLattice) -> LabelAssignment:
    """Compute the introducer concept of every attribute and object."""
    by_extent = {c.extent: i for i, c in enumerate(lat.concepts)}
    attr_intro = tuple(by_extent[ctx.cols[m]] for m in range(ctx.n_attributes))
    obj_intro = tuple(
        by_extent[ctx.obj_closure(1 << g)] for g in range(ctx.n_objects)
    )
    return LabelAssignment(attr_intro, obj_intro)


def introduced_at(ctx: FormalContext, lab: LabelAssignment, concept_index: int
                  ) -> tuple[list[int], list[int]]:
    """(attribute indices, object indices) introduced at one concept."""
    attrs = [m for m, c in enumerate(lab.attribute_introducer) if c == concept_index]
    objs = [g for g, c in enumerate(lab.object_introducer) if c == concept_index]
    return attrs, objs


def lattice_document(
    ctx: FormalContext,
    lat: ConceptLattice,
    lab: LabelAssignment | None = None,
) -> dict:
    """The lattice as a plain dict following the JSON interchange schema."""
    if lab is None:
        lab = labels(ctx, lat)
    concepts = []
    for i, c in enumerate(lat.concepts):
        attrs, objs = introduced_at(ctx, lab, i)
        concepts.append(
            {
                "extent": bit_indices(c.extent),
                "intent": bit_indices(c.intent),
                "layer": lat.layers[i],
                "introduced_attributes": attrs,
                "introduced_objects": objs,
            }
        )
    return {
        "objects": list(ctx.objects),
        "attributes": list(ctx.attributes),
        "concepts": concepts,
        "covers": [list(edge) for edge in lat.covers],
        "height": lattice_height(lat),
    }


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def export_lattice(
    ctx: FormalContext,
    lat: ConceptLattice,
    lab: LabelAssignment | None = None,
    fmt: str = "json",
    full_labels: bool = False,
) -> str:
    """Serialize the lattice as ``json`` or ``dot``.

    Output is deterministic given the canonical concept order. DOT nodes are
    labeled "attrs | objs"; with reduced labels (default) these are the
    attributes and objects introduced at the node, with ``full_labels`` the
    whole intent and extent.
    """
    if fmt == "json":
        doc = lattice_document(ctx, lat, lab)
        return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
    if fmt == "dot":
        if lab is None:
            lab = labels(ctx, lat)
        lines = ["digraph lattice {", "  rankdir=TB;"]
        for i, c in enumerate(lat.concepts):
            if full_labels:
                attrs = ctx.attribute_names(c.intent)
                objs = ctx.object_names(c.extent)
            else:
                ai, oi = introduced_at(ctx, lab, i)
                attrs = [ctx.attributes[m] for m in ai]
                objs = [ctx.objects[g] for g in oi]
            label = _dot_escape(", ".join(attrs) + " | " + ", ".join(objs))
            lines.append(f'  c{i} [label="{label}"];')
        for parent, child in lat.covers:
            lines.append(f"  c{parent} -> c{child};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise UnsupportedFormatError(f"unsupported lattice format {fmt!r}")
