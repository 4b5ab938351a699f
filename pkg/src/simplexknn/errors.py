"""Exception hierarchy for simplexknn.

All package-specific failures derive from :class:`SimplexKnnError`, so callers
can catch one base class. Most also derive from ValueError because they signal
invalid values rather than environmental problems.
"""


class SimplexKnnError(Exception):
    """Base class for every error raised by this package."""


class DegenerateInput(SimplexKnnError, ValueError):
    """A composition with no positive part (direction undefined)."""


class NegativeComponent(SimplexKnnError, ValueError):
    """A composition or perturbation vector with a negative (or non-positive) part."""


class ZeroUnderNegativePower(SimplexKnnError, ValueError):
    """A zero part raised to a negative power; the transform diverges there."""


class DimensionMismatch(SimplexKnnError, ValueError):
    """Two compositions with different numbers of parts."""


class ZeroInAitchison(SimplexKnnError, ValueError):
    """The log-ratio distance is degenerate when any part is zero."""


class InsufficientTraining(SimplexKnnError, ValueError):
    """k exceeds the number of available training rows."""


class InfeasibleStratification(SimplexKnnError, ValueError):
    """Requested test-set size cannot represent every class."""


class UndefinedRoc(SimplexKnnError, ValueError):
    """ROC needs at least one positive and one negative instance."""


class IngestionError(SimplexKnnError, ValueError):
    """A CSV file failed validation; the message names the row/column."""
