"""Exception hierarchy shared by every module."""


class InvrecError(Exception):
    """Base class for all library errors."""


class SingularBasis(InvrecError):
    pass


class ZeroVector(InvrecError):
    pass


class CollinearInput(InvrecError):
    pass


class SearchBoundExhausted(InvrecError):
    """No lattice vector within the coefficient bound matched the request."""


class NonGeneric(InvrecError):
    """A determinant or genericity quantity fell below its threshold."""


class AmbiguousSigns(InvrecError):
    """Zero or several sign triples survived the Step-1 selection."""


class BadModulus(InvrecError):
    pass


class IllConditioned(InvrecError):
    pass


class TruncationTooSmall(InvrecError):
    pass


class InterlacingViolation(InvrecError):
    pass


class GapUnderflow(InvrecError):
    pass


class FormatError(InvrecError):
    """Malformed text input (potential, invariant, lattice or Hill blocks)."""
