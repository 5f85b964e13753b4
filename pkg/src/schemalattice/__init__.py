"""Concept-lattice workbench for consolidating data-lake schemas."""

from .context import FormalContext, build_context
from .errors import SchemaLatticeError
from .ingest import (
    Catalog,
    SchemaRecord,
    catalog_to_context,
    parse_csv_crosstable,
    parse_cxt,
    write_csv_crosstable,
    write_cxt,
)
from .lattice import (
    Concept,
    ConceptLattice,
    build_lattice,
    enumerate_concepts,
    export_lattice,
    labels,
    lattice_height,
)
from .metrics import (
    ContextStats,
    CoverageReport,
    attribute_frequencies,
    compare_stats,
    context_stats,
    coverage_curve,
)
from .transform import (
    MergeAttributes,
    MergeObjects,
    RenameAttribute,
    RenameObject,
    ReplaceFields,
    TransformScript,
    apply_op,
    apply_script,
    diff_contexts,
    preview,
)

__version__ = "0.1.0"

__all__ = [
    "FormalContext",
    "build_context",
    "SchemaLatticeError",
    "Catalog",
    "SchemaRecord",
    "catalog_to_context",
    "parse_csv_crosstable",
    "parse_cxt",
    "write_csv_crosstable",
    "write_cxt",
    "Concept",
    "ConceptLattice",
    "build_lattice",
    "enumerate_concepts",
    "export_lattice",
    "labels",
    "lattice_height",
    "ContextStats",
    "CoverageReport",
    "attribute_frequencies",
    "compare_stats",
    "context_stats",
    "coverage_curve",
    "MergeAttributes",
    "MergeObjects",
    "RenameAttribute",
    "RenameObject",
    "ReplaceFields",
    "TransformScript",
    "apply_op",
    "apply_script",
    "diff_contexts",
    "preview",
    "__version__",
]
