"""Shared test helpers: a brute-force concept oracle and random contexts.

The oracle works on plain name sets and never touches the package's bitmask
kernel or enumeration, so it stays an independent check.
"""

from __future__ import annotations

import random
from itertools import combinations

from schemalattice.context import FormalContext, build_context

# Toy cross table used throughout: three monitoring structures and the raw
# field names they carry.
TOY_OBJECTS = ["Storage", "DBTablespace", "ServiceCall"]
TOY_ATTRIBUTES = [
    "time",
    "timestamp",
    "used",
    "max",
    "path",
    "name",
    "serviceName",
    "duration",
]
TOY_PAIRS = [
    ("Storage", "time"),
    ("Storage", "used"),
    ("Storage", "max"),
    ("Storage", "path"),
    ("DBTablespace", "time"),
    ("DBTablespace", "used"),
    ("DBTablespace", "max"),
    ("DBTablespace", "name"),
    ("ServiceCall", "timestamp"),
    ("ServiceCall", "name"),
    ("ServiceCall", "serviceName"),
    ("ServiceCall", "duration"),
]


def toy_context() -> FormalContext:
    return build_context(TOY_OBJECTS, TOY_ATTRIBUTES, TOY_PAIRS)


def oracle_extent(objects, pairs, attrs) -> frozenset:
    return frozenset(g for g in objects if all((g, m) in pairs for m in attrs))


def oracle_intent(attributes, pairs, objs) -> frozenset:
    return frozenset(m for m in attributes if all((g, m) in pairs for g in objs))


def oracle_concepts(
    objects: list[str], attributes: list[str], pairs: set[tuple[str, str]]
) -> set[tuple[frozenset, frozenset]]:
    """All formal concepts by closing every attribute subset. Exponential in
    the attribute count; keep inputs small."""
    concepts = set()
    for r in range(len(attributes) + 1):
        for combo in combinations(attributes, r):
            extent = oracle_extent(objects, pairs, combo)
            intent = oracle_intent(attributes, pairs, extent)
            concepts.add((extent, intent))
    return concepts


def next_closure_concept_count(
    objects: list[str], attributes: list[str], pairs: set[tuple[str, str]]
) -> int:
    """Concept count via lectic-order closure enumeration on name sets.

    A second independent oracle: polynomial-delay, so it scales to the
    fixture-sized contexts where subset enumeration cannot go.
    """
    m = len(attributes)
    index_of = {a: i for i, a in enumerate(attributes)}
    attr_extent = [
        frozenset(g for g in objects if (g, a) in pairs) for a in attributes
    ]
    all_objects = frozenset(objects)
    row = {
        g: frozenset(index_of[a] for a in attributes if (g, a) in pairs)
        for g in objects
    }
    all_attrs = frozenset(range(m))

    def closure(attr_indices: frozenset[int]) -> frozenset[int]:
        extent = all_objects
        for i in attr_indices:
            extent &= attr_extent[i]
        intent = all_attrs
        for g in extent:
            intent &= row[g]
        return frozenset(intent)

    count = 0
    current = closure(frozenset())
    while current is not None:
        count += 1
        nxt = None
        work = set(current)
        for i in reversed(range(m)):
            if i in work:
                work.discard(i)
            else:
                candidate = closure(frozenset(work) | {i})
                if all(j >= i or j in work for j in candidate):
                    nxt = candidate
                    break
        current = nxt
    return count


def concepts_as_name_sets(ctx: FormalContext, concepts) -> set:
    return {
        (
            frozenset(ctx.object_names(c.extent)),
            frozenset(ctx.attribute_names(c.intent)),
        )
        for c in concepts
    }


def random_context(
    rng: random.Random,
    max_objects: int = 8,
    max_attributes: int = 10,
    density: float | None = None,
) -> tuple[FormalContext, set[tuple[str, str]]]:
    """A random context plus its incidence pairs for the oracle."""
    n_obj = rng.randint(0, max_objects)
    n_attr = rng.randint(0, max_attributes)
    if density is None:
        density = rng.choice([0.2, 0.5, 0.8])
    objects = [f"g{i}" for i in range(n_obj)]
    attributes = [f"m{j}" for j in range(n_attr)]
    pairs = {
        (g, m) for g in objects for m in attributes if rng.random() < density
    }
    return build_context(objects, attributes, sorted(pairs)), pairs
