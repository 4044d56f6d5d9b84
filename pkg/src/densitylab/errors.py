"""Error taxonomy shared by all densitylab modules."""


class DensityLabError(Exception):
    """Base class for all densitylab errors."""


class IntegrityError(DensityLabError):
    """An oracle contradicted itself (non-increasing enumeration, broken
    bijectivity, exhausted enumeration where an infinite set was promised)."""


class HorizonError(DensityLabError):
    """A query needed information at or beyond the declared horizon.

    Raised instead of silently truncating; callers must widen the horizon.
    """


class PreconditionError(DensityLabError):
    """An operation's stated precondition failed on the audited prefix."""


class ContainmentError(DensityLabError):
    """A subset relation failed; carries the witnessing element."""

    def __init__(self, message: str, witness: int):
        super().__init__(f"{message} (witness: {witness})")
        self.witness = witness


class DegenerateCheckpointError(DensityLabError):
    """A relative-density checkpoint had an empty denominator set."""


class InconclusiveError(DensityLabError):
    """The horizon was too small for the check to say anything at all."""


class ResourceError(DensityLabError):
    """The requested realization is too large to materialize."""
