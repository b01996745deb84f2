"""Exception types raised across the library."""


class CsprqError(Exception):
    """Base class for library errors."""


class DegenerateGeometryError(CsprqError):
    """A clipping step produced a ring with fewer than 3 non-collinear
    vertices after snapping; the input likely needs perturbation."""


class SelectionError(CsprqError):
    """No subdivision contains the recorded location; the location either
    violates the restricted-area constraint or the geometry degenerated."""


class ZeroAreaRegionError(CsprqError):
    """An uncertainty region with zero area cannot normalize a probability."""


class SampleStarvationError(CsprqError):
    """Rejection sampling accepted zero points; the region is degenerate
    relative to its bounding box."""


class PlacementError(CsprqError):
    """Synthetic dataset generation could not place an entity after the
    configured number of retries (space too crowded)."""


class MissingPrecomputationError(CsprqError):
    """A precomputation-based query was issued before precompute_all ran."""


class UnknownObjectError(CsprqError):
    """An object id is not present in the workspace."""


class ConstraintViolationError(CsprqError):
    """A reported location lies strictly inside a restricted area."""


class DatasetFormatError(CsprqError):
    """A dataset file could not be parsed; carries the offending line number."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no
