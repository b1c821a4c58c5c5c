"""Exception types raised across the package.

Every error is a subclass of :class:`NerccError`, so callers can catch the
whole family with one clause.  Names describe the violated condition.
"""


class NerccError(Exception):
    """Base class for all errors raised by this package."""


# --- spline -----------------------------------------------------------------

class TooFewKnots(NerccError):
    """A smoothing spline needs at least three knots."""


class NonIncreasingKnots(NerccError):
    """Knot sequence is not strictly increasing."""


class NonFiniteInput(NerccError):
    """An input array contains NaN or infinity."""


# codec-side alias for the same condition on data matrices
NonFiniteData = NonFiniteInput


class NegativeLambda(NerccError):
    """Smoothing parameters must be finite and >= 0."""


class NonFiniteQuery(NerccError):
    """Evaluation points contain NaN or infinity."""


class NonFiniteResult(NerccError):
    """A computation produced NaN or infinity."""


class SingularSystem(NerccError):
    """The dense normal system could not be solved."""


# --- codec / simulator ------------------------------------------------------

class ShapeMismatch(NerccError):
    """Array shapes are inconsistent with each other or with a declaration."""


class TooFewPoints(NerccError):
    """An operation received fewer points than its minimum."""


class DecodingInfeasible(NerccError):
    """Too few surviving workers to fit the decoding regression."""


class IndexOutOfRange(NerccError):
    """A worker index lies outside [0, N)."""


class CountOutOfRange(NerccError):
    """A straggler count lies outside [0, N)."""


# --- models -----------------------------------------------------------------

class ParseError(NerccError):
    """A manifest or config document could not be parsed."""


class MissingTensorFile(NerccError):
    """A tensor file referenced by a manifest does not exist."""


class ModelLoadError(NerccError):
    """A model could not be constructed from its description."""


# --- metrics ----------------------------------------------------------------

class ZeroBaseAccuracy(NerccError):
    """The labelled-accuracy ratio is undefined when the base model scores 0."""


# --- experiments / plotting -------------------------------------------------

class ConfigInvalid(NerccError):
    """An experiment configuration violates its invariants."""


class UnknownColumn(NerccError):
    """A requested CSV column is not present in the header."""


class EmptyInput(NerccError):
    """A CSV has no data rows to plot."""
