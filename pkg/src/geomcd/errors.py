"""Exception hierarchy shared across the package."""


class GeomcdError(Exception):
    """Base class for all package errors."""


class ElevationOutOfRange(GeomcdError):
    """Elevation angle outside [-90, 90]; the axis is not periodic."""


class DimensionMismatch(GeomcdError):
    """Frames or arrays with incompatible shapes."""


class TooFewFrames(GeomcdError):
    """An operation needs more frames than were supplied."""


class RankTooLarge(GeomcdError):
    """Requested truncation rank exceeds min(n, m-1)."""


class DegenerateData(GeomcdError):
    """A retained singular value is numerically zero; inverting it would explode."""


class IndexOutOfRange(GeomcdError):
    """A mode or frame index outside the valid range."""


class EmptyImage(GeomcdError):
    """An image with zero pixels."""


class BoxOutOfFrame(GeomcdError):
    """A bounding box extending beyond the owning frame."""


class EmptyGroundTruth(GeomcdError):
    """A class with no ground-truth boxes; its AP is undefined."""


class InvalidBin(GeomcdError):
    """An angular bin code violating its invariants."""


class NotARotation(GeomcdError):
    """A 3x3 matrix that is not a proper rotation, or one with no valid pose."""


class ZeroRealDelta(GeomcdError):
    """Percentage error is undefined for a zero reference delta."""


class OutOfOrderEvent(GeomcdError):
    """Event frame index decreased within one log."""


class UnknownObject(GeomcdError):
    """Event references an object absent from the initial scene state."""


class CorruptLog(GeomcdError):
    """Event log bytes fail framing, checksum, or schema validation."""


class IoFailure(GeomcdError):
    """Underlying file I/O failed."""


class MalformedStl(GeomcdError):
    """STL bytes violating the binary or ASCII layout."""


class MalformedObj(GeomcdError):
    """OBJ text with bad indices or non-numeric coordinates."""


class InvalidConfig(GeomcdError):
    """A scenario or pipeline configuration violating its invariants."""


class ProtocolError(GeomcdError):
    """Adapter subprocess spoke a malformed or error response."""
