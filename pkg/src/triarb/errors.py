"""Exception types shared across the package."""


class TriarbError(Exception):
    """Base class for all input and domain errors raised by triarb."""


class TickParseError(TriarbError):
    """A tick file row could not be parsed; carries the 1-based line number."""

    def __init__(self, path, line_no: int, message: str):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class TickOrderingError(TriarbError):
    """Raw tick timestamps decreased within one file."""


class EmptySeriesError(TriarbError):
    """No tick of the file falls inside the requested window."""


class AlignmentError(TriarbError):
    """The three pair series of a triangle do not share a grid window."""


class SynthConfigError(TriarbError):
    """A synthetic-data configuration is invalid or an injection is infeasible."""


class UndefinedBreakEvenError(TriarbError):
    """Break-even analysis was requested but no opportunity clears the threshold."""


class CrossedQuoteWarning(UserWarning):
    """A quote with bid > ask was accepted at ingestion."""
