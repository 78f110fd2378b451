"""Exception hierarchy shared by all modules."""


class OPDCError(Exception):
    """Base class for every error raised by this package."""


class PoleInParameters(OPDCError):
    """A denominator factor of a closed-form coefficient vanishes.

    Attributes
    ----------
    factor : str
        Human-readable name of the vanishing factor.
    index : int or None
        Recurrence index at which it vanishes.
    """

    def __init__(self, factor, index=None):
        self.factor = factor
        self.index = index
        where = "" if index is None else f" at n={index}"
        super().__init__(f"pole: factor {factor} vanishes{where}")


class DegenerateReflection(OPDCError):
    """Some |a_k| = 1, so r_k = 0 and the matrix builders cannot proceed."""

    def __init__(self, index):
        self.index = index
        super().__init__(f"degenerate reflection parameter: |a_{index}| = 1")


class DegenerateRecursion(OPDCError):
    """A recursive generator hit a zero divisor (e.g. 1 + a_{k-1} = 0)."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class ZeroAtTheta(OPDCError):
    """P_{k+1}(theta) = 0, i.e. A_k = 0: the Christoffel step is undefined."""

    def __init__(self, index):
        self.index = index
        super().__init__(f"A_{index} = 0 (polynomial vanishes at theta)")


class NotAPerfectSquare(OPDCError):
    pass


class ZeroSqrt(OPDCError):
    pass


class InconsistentTheta(OPDCError):
    pass


class IdentityViolation(OPDCError):
    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class NotPositiveDefinite(OPDCError):
    pass


class SingularPivot(OPDCError):
    pass


class NoSolution(OPDCError):
    pass


class NonFiniteValue(OPDCError):
    pass
