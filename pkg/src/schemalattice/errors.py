"""Exception types raised across the package.

Everything derives from SchemaLatticeError so callers can catch the whole
family at a boundary (CLI, HTTP) and map it to a diagnostic.
"""


class SchemaLatticeError(Exception):
    """Base class for all errors raised by this package."""


class DuplicateNameError(SchemaLatticeError):
    """An object or attribute name occurs more than once."""


class UnknownNameError(SchemaLatticeError):
    """A referenced object or attribute name is not declared."""


class InvalidNameError(SchemaLatticeError):
    """A name is empty or otherwise unusable."""


class IndexOutOfRangeError(SchemaLatticeError):
    """A set refers to indices outside the owning context."""


class ResourceLimitExceededError(SchemaLatticeError):
    """Concept enumeration exceeded the configured cap."""


class InconsistentInputError(SchemaLatticeError):
    """Supplied concepts are not the closure family of the context."""


class UnsupportedFormatError(SchemaLatticeError):
    """Requested export format is not one of the supported ones."""


# -- ingest ----------------------------------------------------------------

class MalformedHeaderError(SchemaLatticeError):
    """CXT input does not start with the expected header."""


class CountMismatchError(SchemaLatticeError):
    """Declared object/attribute counts disagree with the data lines."""


class BadCellError(SchemaLatticeError):
    """An incidence cell holds a character outside the allowed alphabet."""


class RaggedRowError(SchemaLatticeError):
    """A CSV row has a different number of cells than the header."""


class NotAMappingError(SchemaLatticeError):
    """A document does not contain a usable ``properties`` object."""


class EmptyPropertiesError(SchemaLatticeError):
    """A mapping declares no fields (raised only in strict mode)."""


class DuplicateMeasurementError(SchemaLatticeError):
    """Two measurements in one schema document share a name."""


class MissingNameError(SchemaLatticeError):
    """A measurement entry lacks its ``name`` key."""


# -- transform -------------------------------------------------------------

class InvalidOpError(SchemaLatticeError):
    """A transform op violates its structural invariants."""


class TargetExistsError(SchemaLatticeError):
    """Rename target collides with an existing name."""


class EmptyResultError(SchemaLatticeError):
    """The op would delete the last object or attribute."""
