"""Formal context kernel: objects, attributes, incidence, and the
extent/intent operators with their two closures.

Object and attribute sets are plain Python ints used as bitmasks over
positional indices. Arbitrary-precision ints give dense word-parallel
intersections, which is what the closure-heavy lattice workload needs at
this scale (tens of objects, hundreds of attributes). Names live in side
tables and never participate in set algebra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import (
    DuplicateNameError,
    IndexOutOfRangeError,
    InvalidNameError,
    UnknownNameError,
)


def bit_indices(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def iter_bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_from_indices(indices: Iterable[int], size: int) -> int:
    """Build a bitmask from indices, checking them against ``size``."""
    mask = 0
    for i in indices:
        if not 0 <= i < size:
            raise IndexOutOfRangeError(f"index {i} out of range for size {size}")
        mask |= 1 << i
    return mask


def _check_mask(mask: int, size: int, kind: str) -> None:
    if mask < 0 or mask >> size:
        raise IndexOutOfRangeError(f"{kind} mask {mask:#x} exceeds size {size}")


@dataclass(frozen=True)
class FormalContext:
    """An immutable (objects, attributes, incidence) triple.

    ``rows[g]`` is the attribute bitmask of object ``g``; ``cols[m]`` is the
    derived object bitmask of attribute ``m``. Every mutation elsewhere in
    the package builds a fresh context.
    """

    objects: tuple[str, ...]
    attributes: tuple[str, ...]
    rows: tuple[int, ...]
    cols: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _check_names(self.objects, "object")
        _check_names(self.attributes, "attribute")
        if len(self.rows) != len(self.objects):
            raise IndexOutOfRangeError(
                f"{len(self.rows)} rows for {len(self.objects)} objects"
            )
        n_attrs = len(self.attributes)
        cols = [0] * n_attrs
        for g, row in enumerate(self.rows):
            _check_mask(row, n_attrs, "row")
            for m in iter_bits(row):
                cols[m] |= 1 << g
        object.__setattr__(self, "cols", tuple(cols))

    # -- basic geometry ----------------------------------------------------

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def all_objects(self) -> int:
        return (1 << len(self.objects)) - 1

    @property
    def all_attributes(self) -> int:
        return (1 << len(self.attributes)) - 1

    def incidence_count(self) -> int:
        return sum(row.bit_count() for row in self.rows)

    def has(self, obj: int, attr: int) -> bool:
        if not 0 <= obj < len(self.objects):
            raise IndexOutOfRangeError(f"object index {obj}")
        if not 0 <= attr < len(self.attributes):
            raise IndexOutOfRangeError(f"attribute index {attr}")
        return bool(self.rows[obj] >> attr & 1)

    # -- name lookups --------------------------------------------------------

    def object_index(self, name: str) -> int:
        try:
            return self.objects.index(name)
        except ValueError:
            raise UnknownNameError(f"unknown object {name!r}") from None

    def attribute_index(self, name: str) -> int:
        try:
            return self.attributes.index(name)
        except ValueError:
            raise UnknownNameError(f"unknown attribute {name!r}") from None

    def object_mask(self, names: Iterable[str]) -> int:
        mask = 0
        for name in names:
            mask |= 1 << self.object_index(name)
        return mask

    def attribute_mask(self, names: Iterable[str]) -> int:
        mask = 0
        for name in names:
            mask |= 1 << self.attribute_index(name)
        return mask

    def object_names(self, mask: int) -> list[str]:
        _check_mask(mask, len(self.objects), "object")
        return [self.objects[i] for i in iter_bits(mask)]

    def attribute_names(self, mask: int) -> list[str]:
        _check_mask(mask, len(self.attributes), "attribute")
        return [self.attributes[i] for i in iter_bits(mask)]

    # -- Galois operators ----------------------------------------------------

    def extent(self, attr_mask: int) -> int:
        """Objects that carry every attribute in ``attr_mask``.

        The empty attribute set yields all objects; in general the result is
        the intersection of the single-attribute extents.
        """
        _check_mask(attr_mask, len(self.attributes), "attribute")
        objs = self.all_objects
        for m in iter_bits(attr_mask):
            objs &= self.cols[m]
            if not objs:
                break
        return objs

    def intent(self, obj_mask: int) -> int:
        """Attributes shared by every object in ``obj_mask``."""
        _check_mask(obj_mask, len(self.objects), "object")
        attrs = self.all_attributes
        for g in iter_bits(obj_mask):
            attrs &= self.rows[g]
            if not attrs:
                break
        return attrs

    def attr_closure(self, attr_mask: int) -> int:
        """int(ext(B)): the smallest closed attribute set containing B."""
        return self.intent(self.extent(attr_mask))

    def obj_closure(self, obj_mask: int) -> int:
        """ext(int(A)): the smallest closed object set containing A."""
        return self.extent(self.intent(obj_mask))

    def is_concept(self, obj_mask: int, attr_mask: int) -> bool:
        """True iff (A, B) is a formal concept: A = ext(B) and B = int(A)."""
        return self.extent(attr_mask) == obj_mask and self.intent(obj_mask) == attr_mask


def _check_names(names: Sequence[str], kind: str) -> None:
    seen = set()
    for name in names:
        if not isinstance(name, str) or not name:
            raise InvalidNameError(f"{kind} name must be a non-empty string, got {name!r}")
        if name in seen:
            raise DuplicateNameError(f"duplicate {kind} name {name!r}")
        seen.add(name)


def build_context(
    objects: Sequence[str],
    attributes: Sequence[str],
    pairs: Iterable[tuple[str, str]],
) -> FormalContext:
    """Construct a context from declared names and (object, attribute) pairs.

    Names must be unique and every pair must reference declared names.
    """
    _check_names(objects, "object")
    _check_names(attributes, "attribute")
    obj_index = {name: i for i, name in enumerate(objects)}
    attr_index = {name: i for i, name in enumerate(attributes)}
    rows = [0] * len(objects)
    for obj_name, attr_name in pairs:
        if obj_name not in obj_index:
            raise UnknownNameError(f"unknown object {obj_name!r} in pair")
        if attr_name not in attr_index:
            raise UnknownNameError(f"unknown attribute {attr_name!r} in pair")
        rows[obj_index[obj_name]] |= 1 << attr_index[attr_name]
    return FormalContext(tuple(objects), tuple(attributes), tuple(rows))


def context_from_rows(
    objects: Sequence[str],
    attributes: Sequence[str],
    rows: Sequence[int],
) -> FormalContext:
    """Construct a context directly from row bitmasks."""
    return FormalContext(tuple(objects), tuple(attributes), tuple(rows))
