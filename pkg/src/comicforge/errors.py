"""Exception hierarchy for the comic generation engine."""


class ComicForgeError(Exception):
    """Base class for all engine errors."""


class MalformedSpec(ComicForgeError):
    """An ensemble or chart document is syntactically or structurally invalid."""


class UnknownAttribute(ComicForgeError):
    """A chart binding or transform references an attribute absent from the dataset."""


class DuplicateChartId(ComicForgeError):
    """Two charts in one ensemble share an id."""


class InvalidThreshold(ComicForgeError):
    """A negative clustering threshold was supplied."""


class ShapeOverflow(ComicForgeError):
    """A backbone has more nodes than any tier shape supports."""


class EmptyAfterFiltering(ComicForgeError):
    """Null-row exclusion left a chart with no data to extract facts from."""


class ProviderUnavailable(ComicForgeError):
    """The term-context provider could not be reached; callers degrade gracefully."""


class StaleRevision(ComicForgeError):
    """An edit cited a revision that is no longer current."""

    def __init__(self, expected: int, current: int):
        super().__init__(f"edit targets revision {expected}, document is at {current}")
        self.expected = expected
        self.current = current


class UnknownEntity(ComicForgeError):
    """An edit references a chart, piece, or fact that does not exist."""


class OversizedPiece(ComicForgeError):
    """An edit would grow a story piece beyond the configured size cap."""


class InvalidEdit(ComicForgeError):
    """An edit is well-addressed but violates a domain rule."""


class SchemaVersionMismatch(ComicForgeError):
    """A serialized comic document has an unsupported schema or corrupt field types."""
