"""Exception hierarchy."""

from __future__ import annotations


class IpseriesError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(IpseriesError):
    """Input layout does not match the expected format."""


class ParseError(IpseriesError):
    """A value in the input could not be parsed."""


class SequencingError(IpseriesError):
    """Monthly rows are out of order or have gaps."""


class BoundsError(IpseriesError):
    """An index or date range falls outside the data."""


class LengthError(IpseriesError):
    """Series too short for the requested operation."""


class DegenerateError(IpseriesError):
    """Zero dispersion or otherwise degenerate data."""


class ParameterError(IpseriesError):
    """Invalid tuning parameter."""


class DimensionError(IpseriesError):
    """Paired inputs have mismatched lengths."""


class RankError(IpseriesError):
    """A moment matrix is singular."""


class UnsupportedPositionError(IpseriesError):
    """Requested repair at a position without two neighbours."""


class AmbiguityError(IpseriesError):
    """Adjacent repairs whose result would depend on their order."""
