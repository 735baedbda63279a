"""Exception types shared across the package.

Everything raised on purpose derives from UpkitError so callers can catch
one base class. Names describe the violated precondition or the failed
postcondition, not the call site.
"""


class UpkitError(Exception):
    """Base class for all errors raised by this package."""


# field construction and arithmetic

class NotPrime(UpkitError):
    """The requested characteristic is not a prime number."""


class CharDividesSix(UpkitError):
    """Characteristic 2 or 3; the theory requires 2 and 3 invertible."""


class FieldTooLarge(UpkitError):
    """p^k exceeds the enumeration bound."""


class MixedFields(UpkitError):
    """Operands belong to different fields."""


class DivisionByZero(UpkitError):
    """Multiplicative inverse of zero requested."""


# root combinatorics

class RankTooSmall(UpkitError):
    """Rank below the minimum the operation supports."""


class InconsistentLift(UpkitError):
    """A measured structure constant disagrees between two fields."""


# matrix group

class DimensionMismatch(UpkitError):
    """Matrices of different sizes or over different fields."""


class ZeroTorusEntry(UpkitError):
    """Torus vectors must have invertible entries."""


class NotInGroup(UpkitError):
    """Matrix violates the unitriangular or symplectic invariant."""


class BadIndices(UpkitError):
    """Height or column index outside the valid range."""


# map descriptors

class InvalidDescriptor(UpkitError):
    """Malformed standard-map descriptor."""


class MixedContexts(UpkitError):
    """Composition of maps over different (rank, field) contexts."""


# centralizers

class EmptySet(UpkitError):
    """Centralizer of an empty root set requested."""


# classification pipeline

class StepPostconditionFailed(UpkitError):
    """A pipeline step's exhaustive postcondition check failed.

    Signals either a non-PC oracle or a convention bug; carries the
    offending generator and coefficient in args.
    """


class TauNotAutomorphism(UpkitError):
    """The recovered scalar map is not additive and multiplicative."""


class ResidualNotCentral(UpkitError):
    """The final residual map moved some element by a non-central factor."""


class NotInU12(UpkitError):
    """Commutator solver input is outside the supported subgroup."""


class VerificationMismatch(UpkitError):
    """Recovered factorization disagrees with the oracle at a test point."""


# symbolic engine

class MismatchAtCoefficient(UpkitError):
    """A symbolic expansion differs from the expected table at a monomial."""


# harness

class UnknownLemma(UpkitError):
    """Requested check id is not in the catalog."""


class BadParams(UpkitError):
    """Parameters outside a check's supported domain."""
