# This code is part of fakp and is licensed under the MIT license.
"""Errors raised by the fakp library.

Every error derives from :class:`FAKPError` and from the closest builtin
exception, so callers can catch either.
"""


class FAKPError(Exception):
    """Base class for all fakp errors."""


# numgraph
class ShapeMismatchError(FAKPError, ValueError):
    """Operand shapes are incompatible for the requested operation."""


class DegenerateBatchError(FAKPError, ValueError):
    """Batch statistics are undefined (a single row in training mode)."""


class EmptyAxisError(FAKPError, ValueError):
    """Reduction over an axis of length zero."""


class IndexOutOfRangeError(FAKPError, IndexError):
    """An index or label lies outside its valid range."""


class NotScalarError(FAKPError, ValueError):
    """backward() was called on a tensor with more than one element."""


class GraphConsumedError(FAKPError, RuntimeError):
    """backward() was called twice on the same recorded graph."""


class MissingGradError(FAKPError, RuntimeError):
    """A parameter has no gradient when an optimizer step is requested."""


# geometry / frames
class NotMultipleOfDimError(FAKPError, ValueError):
    """A feature width is not a multiple of the spatial dimension."""


class EmptyCloudError(FAKPError, ValueError):
    """A point cloud has no points."""


class TooFewPointsError(FAKPError, ValueError):
    """Fewer points than dimensions for an eigenvector-based frame."""


class NotSymmetricError(FAKPError, ValueError):
    """A matrix handed to the symmetric eigensolver is not symmetric."""


class DegenerateFrameError(FAKPError, ValueError):
    """Near-repeated covariance eigenvalues make the frame ill-defined."""

    def __init__(self, msg, gap=None):
        super().__init__(msg)
        self.gap = gap


# kpconv
class BadKError(FAKPError, ValueError):
    """Invalid number of kernel points."""


class NeighborRadiusMismatchError(FAKPError, ValueError):
    """Neighbor lists reference points farther away than the layer radius."""


# fa
class GroupsIntersectError(FAKPError, ValueError):
    """Composed frame-averaging wrappers share a group component."""


class NotAGroupError(FAKPError, ValueError):
    """A finite set of transforms is not closed under composition/inverse."""


# data / models
class EmptyDatasetError(FAKPError, ValueError):
    """An operation that needs samples was given none."""


class BadShapeKindError(FAKPError, ValueError):
    """Unknown synthetic shape kind."""


class DegenerateCloudError(FAKPError, RuntimeError):
    """Shape generation kept producing degenerate covariance spectra."""


class ParseError(FAKPError, ValueError):
    """Malformed line in a text input file."""

    def __init__(self, msg, lineno):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class XYZParseError(ParseError):
    """Malformed line in an XYZ point-cloud file."""


class ManifestParseError(ParseError):
    """Malformed line in a dataset manifest."""


class CheckpointFormatError(FAKPError, ValueError):
    """A checkpoint file is truncated or has the wrong header."""
