"""Quantitative diagnostics: attribute frequencies, coverage-vs-top-k,
and context/lattice statistics for before/after comparison."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

from .context import FormalContext
from .lattice import DEFAULT_CONCEPT_CAP, build_lattice, lattice_height


@dataclass(frozen=True)
class ContextStats:
    object_count: int
    attribute_count: int
    concept_count: int
    lattice_height: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CoverageReport:
    """Attributes ranked by (frequency desc, name asc) and, for each prefix
    length k, the fraction of objects whose whole field set lies in the
    top-k attributes. ``baseline`` is the k=0 fraction (empty-intent objects)."""

    ranking: tuple[str, ...]
    counts: tuple[int, ...]
    points: tuple[float, ...]
    baseline: float

    def as_dict(self) -> dict:
        return {
            "ranking": list(self.ranking),
            "counts": list(self.counts),
            "points": list(self.points),
            "baseline": self.baseline,
        }


def attribute_frequencies(ctx: FormalContext) -> list[tuple[str, int]]:
    """Each attribute with the number of objects carrying it, sorted by
    count descending then name ascending."""
    freqs = [
        (name, ctx.cols[m].bit_count()) for m, name in enumerate(ctx.attributes)
    ]
    freqs.sort(key=lambda item: (-item[1], item[0]))
    return freqs


def coverage_curve(ctx: FormalContext) -> CoverageReport:
    """Fraction of fully covered objects per top-k attribute prefix.

    An object is covered at k when its entire row is contained in the k
    most frequent attributes. With no objects every prefix covers
    vacuously.
    """
    freqs = attribute_frequencies(ctx)
    ranking = tuple(name for name, _ in freqs)
    counts = tuple(count for _, count in freqs)
    if ctx.n_objects == 0:
        return CoverageReport(ranking, counts, tuple(1.0 for _ in ranking), 1.0)
    baseline = sum(1 for row in ctx.rows if row == 0) / ctx.n_objects
    points = []
    prefix_mask = 0
    for name in ranking:
        prefix_mask |= 1 << ctx.attribute_index(name)
        covered = sum(1 for row in ctx.rows if row & ~prefix_mask == 0)
        points.append(covered / ctx.n_objects)
    return CoverageReport(ranking, counts, tuple(points), baseline)


def context_stats(
    ctx: FormalContext, max_concepts: int = DEFAULT_CONCEPT_CAP
) -> ContextStats:
    lat = build_lattice(ctx, max_concepts=max_concepts)
    return ContextStats(
        object_count=ctx.n_objects,
        attribute_count=ctx.n_attributes,
        concept_count=len(lat.concepts),
        lattice_height=lattice_height(lat),
    )


@dataclass(frozen=True)
class StatsDelta:
    before: ContextStats
    after: ContextStats
    attribute_reduction: float
    attribute_reduction_percent: int

    def as_dict(self) -> dict:
        return {
            "before": self.before.as_dict(),
            "after": self.after.as_dict(),
            "attribute_reduction": self.attribute_reduction,
            "attribute_reduction_percent": self.attribute_reduction_percent,
        }


def compare_stats(before: ContextStats, after: ContextStats) -> StatsDelta:
    """Before/after comparison with the attribute-count reduction as a raw
    ratio and as a half-up-rounded integer percentage for report text."""
    if before.attribute_count:
        reduction = (
            before.attribute_count - after.attribute_count
        ) / before.attribute_count
    else:
        reduction = 0.0
    percent = int(reduction * 100 + 0.5) if reduction >= 0 else -int(-reduction * 100 + 0.5)
    return StatsDelta(
        before=before,
        after=after,
        attribute_reduction=reduction,
        attribute_reduction_percent=percent,
    )


def coverage_to_csv(report: CoverageReport) -> str:
    """Coverage curve as ``k,attribute_added,coverage`` rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "attribute_added", "coverage"])
    for k, (name, point) in enumerate(zip(report.ranking, report.points), start=1):
        writer.writerow([k, name, f"{point:.6f}"])
    return buf.getvalue()
