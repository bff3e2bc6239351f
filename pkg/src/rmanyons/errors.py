"""Exception types raised across the package."""


class RMAnyonError(Exception):
    """Base class for all package errors."""


class NotReduced(RMAnyonError):
    """The matrix is not a product of generators ``[[0,1],[1,k]]``, k >= 1."""


class NotPrimitive(RMAnyonError):
    """No power of the matrix is strictly positive."""


class NotInjective(RMAnyonError):
    """The integer matrix has zero determinant."""


class HypothesisViolated(RMAnyonError):
    """An input fails the hypotheses required by the construction."""


class NoCommonBasis(RMAnyonError):
    """Fusion matrices are not normal and pairwise commuting."""


class NoAdmissibleMatrix(RMAnyonError):
    """No fixing matrix with nonnegative entries and determinant -1 exists."""


class NotDecomposable(RMAnyonError):
    """A K0 class is not a nonnegative combination of [E_g] and [1]."""


class BranchCut(RMAnyonError):
    """A fractional power argument lies on the principal branch cut."""


class BadParams(RMAnyonError, ValueError):
    """Parameters violate an operation's preconditions."""


class IllConditioned(RMAnyonError):
    """Eigenbasis too ill-conditioned for the functional calculus."""
