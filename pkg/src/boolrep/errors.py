"""Exception hierarchy shared by all boolrep modules.

Every domain error derives from BoolrepError so CLI and library callers can
catch one base class; the leaf classes match the error names in the module
contracts.
"""


class BoolrepError(Exception):
    """Base class for all boolrep domain errors."""


# --- matrices ---------------------------------------------------------------

class DimensionError(BoolrepError):
    """Operation requires a square (or shape-compatible) matrix."""


class SizeError(BoolrepError):
    """Input exceeds a hard size guard (e.g. the permanent's n <= 12)."""


class UnknownColumn(BoolrepError):
    """A referenced column label is not in the matrix."""


class ZeroColumn(BoolrepError):
    """The matrix has an all-zero column (label in args[0])."""


class FormatError(BoolrepError):
    """A text/JSON payload does not follow the documented format."""


# --- lattices ---------------------------------------------------------------

class NotALattice(BoolrepError):
    """The poset lacks a join or meet; the offending pair is in args."""


class CycleError(BoolrepError):
    """The cover relation contains a cycle."""


class BottomElement(BoolrepError):
    """The bottom element is not allowed in this argument."""


class TooLarge(BoolrepError):
    """Input exceeds a configurable enumeration/construction cap."""


# --- hereditary collections -------------------------------------------------

class NotDownwardClosed(BoolrepError):
    """The family is not closed under subsets; a witness pair is in args."""


class EmptyFamily(BoolrepError):
    """A hereditary collection needs at least one member."""


class NotSimple(BoolrepError):
    """Operation requires all 1- and 2-subsets to be independent."""


class RankTooSmall(BoolrepError):
    """Paving semantics require rank > 2."""


class GroundMismatch(BoolrepError):
    """The two operands live on different ground sets."""


class NotRepresentable(BoolrepError):
    """Operation requires a boolean representable collection."""


class NotSubsemilattice(BoolrepError):
    """The family is not a full intersection-closed subfamily of the flats."""


# --- maps -------------------------------------------------------------------

class JoinViolation(BoolrepError):
    """A map fails join preservation; a witness pair is in args."""


class NotSurjective(BoolrepError):
    pass


class NotInjective(BoolrepError):
    pass


class NotADownset(BoolrepError):
    pass


class TopInIdeal(BoolrepError):
    pass


class NotACongruence(BoolrepError):
    pass


class NotAClosure(BoolrepError):
    pass


class NotIntersectionClosed(BoolrepError):
    pass


class NotJoinClosed(BoolrepError):
    pass


# --- geometry ---------------------------------------------------------------

class WrongHeight(BoolrepError):
    pass


class WrongSize(BoolrepError):
    pass


class TooFewLines(BoolrepError):
    pass


class NotAtomic(BoolrepError):
    pass


class BadMpeg(BoolrepError):
    pass
